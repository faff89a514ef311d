#include "coverpath/checkpoint.hpp"

#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace coverpath {
namespace {

constexpr char kMagic[8] = {'C', 'P', 'C', 'K', 'P', 'T', '0', '1'};

template <typename T>
void put(std::string& out, T v) {
  char buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));
  out.append(buf, sizeof(T));
}

template <typename T>
T take(const std::string& in, size_t& at) {
  if (at + sizeof(T) > in.size())
    throw std::runtime_error("checkpoint: truncated stream");
  T v;
  std::memcpy(&v, in.data() + at, sizeof(T));
  at += sizeof(T);
  return v;
}

std::string take_bytes(const std::string& in, size_t& at, size_t len) {
  if (at + len > in.size())
    throw std::runtime_error("checkpoint: truncated stream");
  std::string out = in.substr(at, len);
  at += len;
  return out;
}

}  // namespace

void CheckpointWriter::add_tensor(const std::string& name, const Tensor& t) {
  Section s;
  s.name = name;
  s.type = 0;
  s.shape = t.shape();
  s.values.assign(t.data(), t.data() + t.size());
  sections_.push_back(std::move(s));
}

void CheckpointWriter::add_array(const std::string& name,
                                 const std::vector<double>& v) {
  Section s;
  s.name = name;
  s.type = 0;
  s.shape = {static_cast<int>(v.size())};
  s.values = v;
  sections_.push_back(std::move(s));
}

void CheckpointWriter::add_string(const std::string& name,
                                  const std::string& v) {
  Section s;
  s.name = name;
  s.type = 1;
  s.text = v;
  sections_.push_back(std::move(s));
}

void CheckpointWriter::add_i64(const std::string& name, int64_t v) {
  Section s;
  s.name = name;
  s.type = 2;
  s.i64 = v;
  sections_.push_back(std::move(s));
}

void CheckpointWriter::add_f64(const std::string& name, double v) {
  Section s;
  s.name = name;
  s.type = 3;
  s.f64 = v;
  sections_.push_back(std::move(s));
}

std::string CheckpointWriter::to_bytes() const {
  std::string out;
  out.append(kMagic, sizeof(kMagic));
  put<uint64_t>(out, sections_.size());
  for (const Section& s : sections_) {
    put<uint32_t>(out, static_cast<uint32_t>(s.name.size()));
    out.append(s.name);
    put<uint8_t>(out, s.type);
    switch (s.type) {
      case 0: {
        put<uint32_t>(out, static_cast<uint32_t>(s.shape.size()));
        for (int d : s.shape) put<int32_t>(out, d);
        put<uint64_t>(out, s.values.size());
        out.append(reinterpret_cast<const char*>(s.values.data()),
                   s.values.size() * sizeof(double));
        break;
      }
      case 1: {
        put<uint64_t>(out, s.text.size());
        out.append(s.text);
        break;
      }
      case 2: put<int64_t>(out, s.i64); break;
      case 3: put<double>(out, s.f64); break;
    }
  }
  return out;
}

void CheckpointWriter::write(const std::string& path) const {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("checkpoint: cannot open " + path);
  std::string bytes = to_bytes();
  f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!f) throw std::runtime_error("checkpoint: write failed for " + path);
}

CheckpointReader CheckpointReader::from_bytes(const std::string& bytes) {
  CheckpointReader r;
  size_t at = 0;
  std::string magic = take_bytes(bytes, at, sizeof(kMagic));
  if (std::memcmp(magic.data(), kMagic, sizeof(kMagic)) != 0)
    throw std::runtime_error("checkpoint: bad magic (wrong or old format)");
  uint64_t count = take<uint64_t>(bytes, at);
  for (uint64_t i = 0; i < count; ++i) {
    uint32_t name_len = take<uint32_t>(bytes, at);
    std::string name = take_bytes(bytes, at, name_len);
    Entry e;
    e.type = take<uint8_t>(bytes, at);
    switch (e.type) {
      case 0: {
        uint32_t rank = take<uint32_t>(bytes, at);
        for (uint32_t d = 0; d < rank; ++d)
          e.shape.push_back(take<int32_t>(bytes, at));
        uint64_t n = take<uint64_t>(bytes, at);
        std::string raw = take_bytes(bytes, at, n * sizeof(double));
        e.values.resize(n);
        std::memcpy(e.values.data(), raw.data(), raw.size());
        break;
      }
      case 1: {
        uint64_t n = take<uint64_t>(bytes, at);
        e.text = take_bytes(bytes, at, n);
        break;
      }
      case 2: e.i64 = take<int64_t>(bytes, at); break;
      case 3: e.f64 = take<double>(bytes, at); break;
      default:
        throw std::runtime_error("checkpoint: unknown section type");
    }
    r.entries_[name] = std::move(e);
  }
  return r;
}

CheckpointReader CheckpointReader::from_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("checkpoint: cannot open " + path);
  std::ostringstream buf;
  buf << f.rdbuf();
  return from_bytes(buf.str());
}

const CheckpointReader::Entry& CheckpointReader::get(const std::string& name,
                                                     uint8_t type) const {
  auto it = entries_.find(name);
  if (it == entries_.end())
    throw std::runtime_error("checkpoint: missing section '" + name + "'");
  if (it->second.type != type)
    throw std::runtime_error("checkpoint: section '" + name +
                             "' has the wrong type");
  return it->second;
}

bool CheckpointReader::has(const std::string& name) const {
  return entries_.count(name) != 0;
}

std::vector<int> CheckpointReader::shape(const std::string& name) const {
  return get(name, 0).shape;
}

void CheckpointReader::load_into(const std::string& name, Tensor& dst) const {
  const Entry& e = get(name, 0);
  if (e.shape != dst.shape())
    throw std::runtime_error("checkpoint: shape mismatch for '" + name + "'");
  std::memcpy(dst.data(), e.values.data(), e.values.size() * sizeof(double));
}

std::vector<double> CheckpointReader::array(const std::string& name) const {
  return get(name, 0).values;
}

std::string CheckpointReader::str(const std::string& name) const {
  return get(name, 1).text;
}

int64_t CheckpointReader::i64(const std::string& name) const {
  return get(name, 2).i64;
}

double CheckpointReader::f64(const std::string& name) const {
  return get(name, 3).f64;
}

}  // namespace coverpath
