#pragma once

#include <string>
#include <vector>

namespace coverpath {

struct Coord {
  int r = 0;
  int c = 0;
  bool operator==(const Coord& o) const { return r == o.r && c == o.c; }
  bool operator!=(const Coord& o) const { return !(*this == o); }
};

// Square workspace grid. Cells are free or obstacles; a subset of free cells
// are charging stations, one of which is the base where every episode starts.
//
// Text format: optional '#' comment lines, then a "N=<size>" header, then N
// rows of N characters:
//   .  free cell        #  obstacle
//   C  charging station B  base (exactly one; the base is also a station)
// Comments are only recognized before the header so that obstacle rows
// beginning with '#' stay unambiguous.
class GridMap {
 public:
  GridMap() = default;
  GridMap(int n, std::vector<char> obstacles, std::vector<Coord> stations, Coord base);

  static GridMap parse(const std::string& text);
  std::string serialize() const;

  int size() const { return n_; }
  bool in_bounds(int r, int c) const { return r >= 0 && r < n_ && c >= 0 && c < n_; }
  int index(int r, int c) const { return r * n_ + c; }
  bool is_obstacle(int r, int c) const { return obstacle_[static_cast<size_t>(index(r, c))] != 0; }
  bool is_free(int r, int c) const { return in_bounds(r, c) && !is_obstacle(r, c); }
  bool is_station(int r, int c) const { return station_mask_[static_cast<size_t>(index(r, c))] != 0; }

  const std::vector<Coord>& stations() const { return stations_; }
  Coord base() const { return base_; }
  int obstacle_count() const { return obstacle_count_; }
  int free_cell_count() const { return n_ * n_ - obstacle_count_; }

  // 1 for every free cell reachable from the base by 4-connected moves.
  std::vector<char> reachable_mask() const;
  int reachable_count() const;

 private:
  void build_masks();

  int n_ = 0;
  std::vector<char> obstacle_;      // n*n, 1 = obstacle
  std::vector<char> station_mask_;  // n*n, 1 = station (incl. base)
  std::vector<Coord> stations_;     // base first
  Coord base_;
  int obstacle_count_ = 0;
};

}  // namespace coverpath
