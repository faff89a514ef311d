#include "coverpath/mapgen.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "coverpath/rng.hpp"

namespace coverpath {
namespace {

constexpr int kRetryCap = 1000;

// BFS over free cells; true iff every free cell is reachable from base.
bool fully_connected(int n, const std::vector<char>& blocked, Coord base) {
  int free_total = 0;
  for (char b : blocked)
    if (!b) ++free_total;
  std::vector<char> seen(blocked.size(), 0);
  std::vector<Coord> queue = {base};
  seen[base.r * n + base.c] = 1;
  int reached = 1;
  static const int dr[4] = {-1, 1, 0, 0};
  static const int dc[4] = {0, 0, -1, 1};
  for (size_t head = 0; head < queue.size(); ++head) {
    Coord cur = queue[head];
    for (int a = 0; a < 4; ++a) {
      int r = cur.r + dr[a], c = cur.c + dc[a];
      if (r < 0 || r >= n || c < 0 || c >= n) continue;
      int i = r * n + c;
      if (blocked[i] || seen[i]) continue;
      seen[i] = 1;
      ++reached;
      queue.push_back({r, c});
    }
  }
  return reached == free_total;
}

std::vector<Coord> greedy_maxmin_stations(int n,
                                          const std::vector<char>& blocked,
                                          Coord base, int count) {
  std::vector<Coord> sites = {base};
  std::vector<Coord> picked;
  for (int k = 0; k < count; ++k) {
    Coord best{-1, -1};
    int best_d = -1;
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c) {
        if (blocked[r * n + c]) continue;
        bool taken = false;
        for (const Coord& s : sites)
          if (s.r == r && s.c == c) taken = true;
        if (taken) continue;
        int d = std::numeric_limits<int>::max();
        for (const Coord& s : sites)
          d = std::min(d, std::abs(s.r - r) + std::abs(s.c - c));
        if (d > best_d) {  // ties resolve to the lowest (r,c)
          best_d = d;
          best = {r, c};
        }
      }
    if (best.r < 0)
      throw std::runtime_error(
          "mapgen: not enough free cells for the requested stations");
    sites.push_back(best);
    picked.push_back(best);
  }
  return picked;
}

const char* kMap1 =
    "N=15\n"
    "B..............\n"
    ".....#......#..\n"
    "........#......\n"
    ".#.C.......C...\n"
    "......#......#.\n"
    ".........#.....\n"
    "..#........#...\n"
    ".....#........#\n"
    "#.......#......\n"
    "....#.......#..\n"
    ".#.......#.....\n"
    "...C..#....C...\n"
    "..#.......#....\n"
    ".......#.....#.\n"
    "...............\n";

const char* kMap2 =
    "N=15\n"
    "B......C.......\n"
    "..........##...\n"
    "..........##...\n"
    "...####........\n"
    "...####........\n"
    "...####........\n"
    "...####........\n"
    "C.............C\n"
    "...............\n"
    "........#####..\n"
    "........#####..\n"
    "........#####..\n"
    "........#####..\n"
    "...............\n"
    "....C......C...\n";

const char* kMap3 =
    "N=15\n"
    "B......C....#..\n"
    "........#...##.\n"
    "..##....#......\n"
    "...#....###...C\n"
    "...##.....#....\n"
    "C...##....##...\n"
    ".....#.........\n"
    ".......C....#..\n"
    ".##.........##.\n"
    "..#...##.....#.\n"
    "..##...#....##.\n"
    "...#...##...#..\n"
    "...##...##.....\n"
    ".....##..#.....\n"
    "..C...#......C.\n";

}  // namespace

std::string to_string(LayoutStrategy s) {
  switch (s) {
    case LayoutStrategy::Strategic: return "strategic";
    case LayoutStrategy::Random: return "random";
    case LayoutStrategy::PathConstrained: return "path_constrained";
    case LayoutStrategy::Sparse: return "sparse";
  }
  throw std::invalid_argument("to_string: bad layout strategy");
}

LayoutStrategy layout_from_string(const std::string& name) {
  if (name == "strategic") return LayoutStrategy::Strategic;
  if (name == "random") return LayoutStrategy::Random;
  if (name == "path_constrained") return LayoutStrategy::PathConstrained;
  if (name == "sparse") return LayoutStrategy::Sparse;
  throw std::invalid_argument("unknown layout strategy: " + name);
}

GridMap generate(const MapSpec& spec) {
  if (spec.n < 1) throw std::invalid_argument("mapgen: N must be positive");
  if (spec.density < 0.0 || spec.density > 0.5)
    throw std::invalid_argument("mapgen: density must lie in [0, 0.5]");
  if (spec.stations < 1)
    throw std::invalid_argument("mapgen: need at least one station");

  int n = spec.n;
  Coord base{0, 0};
  int target = static_cast<int>(std::floor(spec.density * n * n));
  Rng rng(mix_seed(spec.seed, 7001));

  std::vector<int> cells;
  for (int i = 1; i < n * n; ++i) cells.push_back(i);  // skip the base
  if (target > static_cast<int>(cells.size()))
    throw std::invalid_argument("mapgen: density leaves no room for a base");

  // Obstacles go in one at a time; a placement that disconnects any free
  // cell from the base is rejected and the next candidate is tried.  A pass
  // that cannot reach the target count restarts the whole layout.
  std::vector<char> blocked(static_cast<size_t>(n) * n, 0);
  bool ok = target == 0;
  for (int attempt = 0; attempt < kRetryCap && !ok; ++attempt) {
    std::fill(blocked.begin(), blocked.end(), 0);
    rng.shuffle(cells);
    int placed = 0;
    for (size_t i = 0; i < cells.size() && placed < target; ++i) {
      blocked[cells[i]] = 1;
      if (fully_connected(n, blocked, base))
        ++placed;
      else
        blocked[cells[i]] = 0;
    }
    ok = placed == target;
  }
  if (!ok) {
    std::ostringstream os;
    os << "mapgen: no fully-connected layout found after " << kRetryCap
       << " attempts (N=" << n << ", density=" << spec.density << ")";
    throw std::runtime_error(os.str());
  }

  int count = spec.stations;
  LayoutStrategy layout = spec.layout;
  if (layout == LayoutStrategy::Sparse) {
    count = (spec.stations + 2) / 3;
    layout = LayoutStrategy::Strategic;
  }

  std::vector<Coord> stations;
  if (layout == LayoutStrategy::Strategic) {
    stations = greedy_maxmin_stations(n, blocked, base, count);
  } else {
    std::vector<Coord> pool;
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c) {
        if (blocked[r * n + c] || (r == base.r && c == base.c)) continue;
        if (layout == LayoutStrategy::PathConstrained &&
            !(r == 0 || r == n - 1 || c == 0 || c == n - 1))
          continue;
        pool.push_back({r, c});
      }
    if (static_cast<int>(pool.size()) < count)
      throw std::runtime_error(
          "mapgen: not enough eligible free cells for the requested "
          "stations");
    rng.shuffle(pool);
    stations.assign(pool.begin(), pool.begin() + count);
  }

  return GridMap(n, blocked, stations, base);
}

GridMap builtin_map(int id) {
  switch (id) {
    case 1: return GridMap::parse(kMap1);
    case 2: return GridMap::parse(kMap2);
    case 3: return GridMap::parse(kMap3);
    default:
      throw std::invalid_argument("builtin_map: id must be 1, 2, or 3");
  }
}

std::string write_map_text(const GridMap& map, const MapSpec& spec) {
  std::ostringstream os;
  os << "# layout=" << to_string(spec.layout) << "\n";
  os << "# density=" << spec.density << "\n";
  os << "# stations=" << spec.stations << "\n";
  os << "# seed=" << spec.seed << "\n";
  os << map.serialize();
  return os.str();
}

std::map<std::string, std::string> read_header_metadata(
    const std::string& text) {
  std::map<std::string, std::string> meta;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    if (line[0] != '#') break;  // header comments end at the first data line
    size_t start = line.find_first_not_of("# \t");
    if (start == std::string::npos) continue;
    size_t eq = line.find('=', start);
    if (eq == std::string::npos) continue;
    std::string key = line.substr(start, eq - start);
    std::string value = line.substr(eq + 1);
    while (!key.empty() && (key.back() == ' ' || key.back() == '\t'))
      key.pop_back();
    meta[key] = value;
  }
  return meta;
}

}  // namespace coverpath
