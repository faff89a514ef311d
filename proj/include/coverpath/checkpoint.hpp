#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "coverpath/tensor.hpp"

namespace coverpath {

// Versioned binary container for model snapshots: named sections holding
// shaped double arrays, strings, and integer/floating scalars.  Doubles are
// stored raw (little-endian IEEE754), so save -> load round-trips values
// bit-exactly.

class CheckpointWriter {
 public:
  void add_tensor(const std::string& name, const Tensor& t);
  void add_array(const std::string& name, const std::vector<double>& v);
  void add_string(const std::string& name, const std::string& v);
  void add_i64(const std::string& name, int64_t v);
  void add_f64(const std::string& name, double v);

  std::string to_bytes() const;
  void write(const std::string& path) const;

 private:
  struct Section {
    std::string name;
    uint8_t type;  // 0 shaped array, 1 string, 2 i64, 3 f64
    std::vector<int> shape;
    std::vector<double> values;
    std::string text;
    int64_t i64 = 0;
    double f64 = 0.0;
  };
  std::vector<Section> sections_;
};

class CheckpointReader {
 public:
  static CheckpointReader from_bytes(const std::string& bytes);
  static CheckpointReader from_file(const std::string& path);

  bool has(const std::string& name) const;
  std::vector<int> shape(const std::string& name) const;
  // Copies the stored values into dst; throws on missing name or shape
  // mismatch.
  void load_into(const std::string& name, Tensor& dst) const;
  std::vector<double> array(const std::string& name) const;
  std::string str(const std::string& name) const;
  int64_t i64(const std::string& name) const;
  double f64(const std::string& name) const;

 private:
  struct Entry {
    uint8_t type = 0;
    std::vector<int> shape;
    std::vector<double> values;
    std::string text;
    int64_t i64 = 0;
    double f64 = 0.0;
  };
  std::map<std::string, Entry> entries_;
  const Entry& get(const std::string& name, uint8_t type) const;
};

}  // namespace coverpath
