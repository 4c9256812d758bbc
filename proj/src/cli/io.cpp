#include <bit>
#include <charconv>
#include <cstring>
#include <fstream>
#include <iterator>

#include "mxw/cli.hpp"

namespace mxw::cli {

namespace {

constexpr char magic[4] = {'M', 'X', 'F', 'D'};

void put_u32(std::vector<unsigned char>& out, std::uint32_t v) {
  for (int k = 0; k < 4; ++k) out.push_back(static_cast<unsigned char>(v >> (8 * k)));
}

void put_f64(std::vector<unsigned char>& out, double v) {
  const auto bits = std::bit_cast<std::uint64_t>(v);
  for (int k = 0; k < 8; ++k) out.push_back(static_cast<unsigned char>(bits >> (8 * k)));
}

class Reader {
 public:
  Reader(const std::vector<unsigned char>& b, std::size_t pos) : b_(b), pos_(pos) {}

  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int k = 0; k < 4; ++k) v |= std::uint32_t(b_[pos_++]) << (8 * k);
    return v;
  }
  double f64() {
    need(8);
    std::uint64_t v = 0;
    for (int k = 0; k < 8; ++k) v |= std::uint64_t(b_[pos_++]) << (8 * k);
    return std::bit_cast<double>(v);
  }
  std::size_t remaining() const { return b_.size() - pos_; }

  void need(std::size_t k) const {
    if (remaining() < k) throw Error(ErrorKind::Io, "field file is truncated");
  }

 private:
  const std::vector<unsigned char>& b_;
  std::size_t pos_;
};

}  // namespace

std::vector<unsigned char> encode_field(const Field& f) {
  const Grid& g = f.grid;
  std::vector<unsigned char> out(magic, magic + 4);
  out.reserve(4 + 12 + 12 * g.dim + 16 * f.data.size());
  put_u32(out, field_file_version);
  put_u32(out, std::uint32_t(g.dim));
  put_u32(out, std::uint32_t(f.ncomp));
  for (int a = 0; a < g.dim; ++a) put_u32(out, std::uint32_t(g.n));
  for (int a = 0; a < g.dim; ++a) put_f64(out, g.length[a]);
  for (const cd& v : f.data) {
    put_f64(out, v.real());
    put_f64(out, v.imag());
  }
  return out;
}

Field decode_field(const std::vector<unsigned char>& bytes) {
  if (bytes.size() < 4 || std::memcmp(bytes.data(), magic, 4) != 0)
    throw Error(ErrorKind::Io, "not a field file (bad magic)");
  Reader r(bytes, 4);
  const std::uint32_t version = r.u32();
  if (version != field_file_version) throw Error(ErrorKind::Io, "unsupported field file version " + std::to_string(version));
  const std::uint32_t dim = r.u32(), ncomp = r.u32();
  if (dim != 2 && dim != 3) throw Error(ErrorKind::Io, "field file dimension must be 2 or 3");
  if (ncomp == 0 || ncomp > 64) throw Error(ErrorKind::Io, "field file component count out of range");
  std::uint32_t n[3] = {0, 0, 0};
  for (std::uint32_t a = 0; a < dim; ++a) n[a] = r.u32();
  for (std::uint32_t a = 1; a < dim; ++a)
    if (n[a] != n[0]) throw Error(ErrorKind::Io, "field files with unequal axis sizes are not supported");
  std::array<double, 3> len{1.0, 1.0, 1.0};
  for (std::uint32_t a = 0; a < dim; ++a) len[a] = r.f64();
  Grid g;
  try {
    g = Grid::make(int(dim), int(n[0]), len);
  } catch (const Error& e) {
    throw Error(ErrorKind::Io, std::string("field file header: ") + e.what());
  }
  const std::size_t expected = 16 * std::size_t(ncomp) * g.points();
  if (r.remaining() != expected)
    throw Error(ErrorKind::Io, "field file holds " + std::to_string(r.remaining()) + " sample bytes, header implies " +
                                   std::to_string(expected));
  Field f(g, int(ncomp));
  for (cd& v : f.data) {
    const double re = r.f64();
    v = cd(re, r.f64());
  }
  return f;
}

void write_field(const std::filesystem::path& path, const Field& f) {
  const auto bytes = encode_field(f);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), std::streamsize(bytes.size()));
  if (!out) throw Error(ErrorKind::Io, "short write to " + path.string());
}

Field read_field(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path.string());
  const std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return decode_field(bytes);
}

std::string format_number(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

Csv::Csv(std::vector<std::string> header) : columns_(header.size()) { row(header); }

void Csv::row(const std::vector<double>& values) {
  std::vector<std::string> s;
  s.reserve(values.size());
  for (double v : values) s.push_back(format_number(v));
  row(s);
}

void Csv::row(const std::vector<std::string>& values) {
  if (values.size() != columns_) throw Error(ErrorKind::InvalidArgument, "CSV row has the wrong number of columns");
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (k) text_ += ',';
    text_ += values[k];
  }
  text_ += '\n';
}

void Csv::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
  out << text_;
}

}  // namespace mxw::cli
