#ifndef FR_TNTP_HPP
#define FR_TNTP_HPP

#include <algorithm>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "fr/network.hpp"

namespace fr {

// ---------------------------------------------------------------------------
// TNTP ingestion. Net files: metadata lines starting with '<', a '~' header
// line, then per-link rows "init term capacity length fft b power ..." with a
// trailing ';'. Only the seven canonical columns are read; node numbers are
// converted to 0-based. Trips files: "Origin o" blocks with "d : amount;"
// entries. OD pairs are sorted by demand descending (ties by origin then
// destination) and truncated to top_n_od.
// ---------------------------------------------------------------------------

struct TntpResult {
  Network network;
  std::vector<std::string> warnings;
};

namespace detail {

inline std::string strip(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

inline bool tntp_skippable(const std::string& line) {
  const std::string t = strip(line);
  return t.empty() || t[0] == '<' || t[0] == '~';
}

}  // namespace detail

inline TntpResult parse_tntp(const std::string& net_file, const std::string& trips_file,
                             int top_n_od) {
  require(top_n_od >= 0, "top_n_od must be nonnegative");
  std::ifstream net_in(net_file);
  if (!net_in) throw DomainError("cannot open net file: " + net_file);

  std::vector<Edge> edges;
  int max_node = 0;
  std::string line;
  int line_no = 0;
  while (std::getline(net_in, line)) {
    ++line_no;
    if (detail::tntp_skippable(line)) continue;
    std::string row = line;
    const std::size_t semi = row.find(';');
    if (semi != std::string::npos) row = row.substr(0, semi);
    row = detail::strip(row);
    if (row.empty()) continue;
    std::istringstream iss(row);
    long init = 0, term = 0;
    double cap = 0, length = 0, fft = 0, b = 0, power = 0;
    if (!(iss >> init >> term >> cap >> length >> fft >> b >> power))
      throw ParseError("malformed link row in " + net_file + " line " +
                           std::to_string(line_no),
                       static_cast<std::size_t>(line_no));
    if (init < 1 || term < 1)
      throw ParseError("node numbers must be >= 1 in " + net_file + " line " +
                           std::to_string(line_no),
                       static_cast<std::size_t>(line_no));
    max_node = std::max<int>(max_node, static_cast<int>(std::max(init, term)));
    LatencyFn lat = (cap > 0.0 && power >= 1.0)
                        ? LatencyFn::bpr(fft, b, power, cap)
                        : LatencyFn::constant(fft);
    edges.push_back(Edge{static_cast<int>(init) - 1, static_cast<int>(term) - 1, lat});
  }
  if (edges.empty()) throw ParseError("net file has no link rows: " + net_file, 0);

  std::vector<std::string> warnings;
  struct Od {
    int o, d;
    double demand;
  };
  std::vector<Od> ods;
  std::ifstream trips_in(trips_file);
  if (!trips_in) throw DomainError("cannot open trips file: " + trips_file);
  int origin = -1;
  line_no = 0;
  while (std::getline(trips_in, line)) {
    ++line_no;
    if (detail::tntp_skippable(line)) continue;
    std::string t = detail::strip(line);
    if (t.rfind("Origin", 0) == 0) {
      std::istringstream iss(t.substr(6));
      long o = 0;
      if (!(iss >> o))
        throw ParseError("malformed Origin line in " + trips_file + " line " +
                             std::to_string(line_no),
                         static_cast<std::size_t>(line_no));
      origin = static_cast<int>(o);
      continue;
    }
    if (origin < 0)
      throw ParseError("trip entry before any Origin in " + trips_file + " line " +
                           std::to_string(line_no),
                       static_cast<std::size_t>(line_no));
    // entries of the form "dest : amount ;", possibly several per line
    std::istringstream iss(t);
    std::string tok;
    while (std::getline(iss, tok, ';')) {
      tok = detail::strip(tok);
      if (tok.empty()) continue;
      const std::size_t colon = tok.find(':');
      if (colon == std::string::npos)
        throw ParseError("malformed trip entry in " + trips_file + " line " +
                             std::to_string(line_no),
                         static_cast<std::size_t>(line_no));
      const int dest = std::stoi(detail::strip(tok.substr(0, colon)));
      const double amount = std::stod(detail::strip(tok.substr(colon + 1)));
      if (origin > max_node || dest > max_node || origin < 1 || dest < 1) {
        warnings.push_back("skipping OD (" + std::to_string(origin) + "," +
                           std::to_string(dest) + "): node outside network");
        continue;
      }
      if (origin == dest || amount <= 0.0) continue;
      ods.push_back(Od{origin - 1, dest - 1, amount});
    }
  }
  if (ods.empty()) warnings.push_back("trips file has no positive OD demand");

  std::sort(ods.begin(), ods.end(), [](const Od& a, const Od& b) {
    if (a.demand != b.demand) return a.demand > b.demand;
    if (a.o != b.o) return a.o < b.o;
    return a.d < b.d;
  });
  if (static_cast<int>(ods.size()) > top_n_od) ods.resize(static_cast<std::size_t>(top_n_od));

  std::vector<Commodity> commodities;
  commodities.reserve(ods.size());
  for (const Od& od : ods) commodities.push_back(Commodity{od.o, od.d, od.demand});

  return TntpResult{Network(max_node, std::move(edges), std::move(commodities)),
                    std::move(warnings)};
}

}  // namespace fr

#endif  // FR_TNTP_HPP
