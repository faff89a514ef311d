#include "coverpath/grid_map.hpp"

#include <algorithm>
#include <deque>
#include <sstream>
#include <stdexcept>

namespace coverpath {

GridMap::GridMap(int n, std::vector<char> obstacles, std::vector<Coord> stations,
                 Coord base)
    : n_(n), obstacle_(std::move(obstacles)), base_(base) {
  if (n <= 0) throw std::runtime_error("map: size must be positive");
  if (obstacle_.size() != static_cast<size_t>(n) * n)
    throw std::runtime_error("map: obstacle mask size mismatch");
  stations_.push_back(base);
  for (const Coord& s : stations)
    if (s != base) stations_.push_back(s);
  build_masks();
}

void GridMap::build_masks() {
  obstacle_count_ = 0;
  for (char o : obstacle_) obstacle_count_ += o ? 1 : 0;
  station_mask_.assign(static_cast<size_t>(n_) * n_, 0);
  for (const Coord& s : stations_) {
    if (!in_bounds(s.r, s.c)) throw std::runtime_error("map: station out of bounds");
    if (is_obstacle(s.r, s.c)) throw std::runtime_error("map: station on an obstacle");
    station_mask_[static_cast<size_t>(index(s.r, s.c))] = 1;
  }
}

GridMap GridMap::parse(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  int n = -1;
  // header: skip comments and blank lines until "N=<int>"
  while (std::getline(in, line)) {
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    if (line.rfind("N=", 0) == 0) {
      try {
        size_t used = 0;
        n = std::stoi(line.substr(2), &used);
        if (used != line.size() - 2) throw std::invalid_argument("trailing");
      } catch (const std::exception&) {
        throw std::runtime_error("map: malformed size header '" + line + "'");
      }
      break;
    }
    throw std::runtime_error("map: expected N=<size> header, got '" + line + "'");
  }
  if (n <= 0) throw std::runtime_error("map: missing or invalid N=<size> header");

  std::vector<char> obstacles(static_cast<size_t>(n) * n, 0);
  std::vector<Coord> stations;
  Coord base{-1, -1};
  int rows = 0;
  while (rows < n && std::getline(in, line)) {
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
    if (line.empty()) continue;
    if (static_cast<int>(line.size()) != n)
      throw std::runtime_error("map: row " + std::to_string(rows) + " has " +
                               std::to_string(line.size()) + " cells, expected " +
                               std::to_string(n));
    for (int c = 0; c < n; ++c) {
      switch (line[static_cast<size_t>(c)]) {
        case '.':
          break;
        case '#':
          obstacles[static_cast<size_t>(rows) * n + c] = 1;
          break;
        case 'C':
          stations.push_back({rows, c});
          break;
        case 'B':
          if (base.r >= 0) throw std::runtime_error("map: more than one base");
          base = {rows, c};
          break;
        default:
          throw std::runtime_error(std::string("map: invalid cell character '") +
                                   line[static_cast<size_t>(c)] + "'");
      }
    }
    ++rows;
  }
  if (rows != n) throw std::runtime_error("map: expected " + std::to_string(n) +
                                          " rows, got " + std::to_string(rows));
  if (base.r < 0) throw std::runtime_error("map: no base cell (exactly one 'B' required)");
  return GridMap(n, std::move(obstacles), std::move(stations), base);
}

std::string GridMap::serialize() const {
  std::ostringstream out;
  out << "N=" << n_ << "\n";
  for (int r = 0; r < n_; ++r) {
    for (int c = 0; c < n_; ++c) {
      char ch = '.';
      if (is_obstacle(r, c))
        ch = '#';
      else if (base_ == Coord{r, c})
        ch = 'B';
      else if (is_station(r, c))
        ch = 'C';
      out << ch;
    }
    out << "\n";
  }
  return out.str();
}

std::vector<char> GridMap::reachable_mask() const {
  std::vector<char> seen(static_cast<size_t>(n_) * n_, 0);
  std::deque<Coord> q;
  seen[static_cast<size_t>(index(base_.r, base_.c))] = 1;
  q.push_back(base_);
  static const int dr[4] = {-1, 1, 0, 0};
  static const int dc[4] = {0, 0, -1, 1};
  while (!q.empty()) {
    Coord cur = q.front();
    q.pop_front();
    for (int d = 0; d < 4; ++d) {
      int r = cur.r + dr[d], c = cur.c + dc[d];
      if (!is_free(r, c)) continue;
      char& s = seen[static_cast<size_t>(index(r, c))];
      if (!s) {
        s = 1;
        q.push_back({r, c});
      }
    }
  }
  return seen;
}

int GridMap::reachable_count() const {
  auto mask = reachable_mask();
  int n = 0;
  for (char m : mask) n += m ? 1 : 0;
  return n;
}

}  // namespace coverpath
