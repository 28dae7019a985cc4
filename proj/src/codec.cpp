#include "plcpcomp/codec.hpp"

#include <cstring>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "plcpcomp/errors.hpp"

namespace plcpcomp {

const char* to_string(FormatErrorCode code) {
  switch (code) {
    case FormatErrorCode::bad_magic:
      return "bad magic";
    case FormatErrorCode::truncated:
      return "truncated";
    case FormatErrorCode::bad_tag:
      return "bad record tag";
    case FormatErrorCode::length_mismatch:
      return "length mismatch";
    case FormatErrorCode::out_of_bounds:
      return "reference out of bounds";
  }
  return "format error";
}

namespace {

class Writer {
 public:
  explicit Writer(std::ostream& os) : os_(os) {}

  void bytes(const void* data, std::size_t len) {
    os_.write(static_cast<const char*>(data), static_cast<std::streamsize>(len));
    count_ += len;
  }
  void u8(std::uint8_t v) { bytes(&v, 1); }
  void u64(std::uint64_t v) { bytes(&v, sizeof v); }
  std::uint64_t count() const { return count_; }

 private:
  std::ostream& os_;
  std::uint64_t count_ = 0;
};

class Reader {
 public:
  explicit Reader(std::istream& is) : is_(is) {}

  void bytes(void* data, std::size_t len, const char* what) {
    is_.read(static_cast<char*>(data), static_cast<std::streamsize>(len));
    if (static_cast<std::size_t>(is_.gcount()) != len) {
      throw FormatError(FormatErrorCode::truncated, std::string("stream ends inside ") + what);
    }
  }
  std::uint64_t u64(const char* what) {
    std::uint64_t v = 0;
    bytes(&v, sizeof v, what);
    return v;
  }
  /// -1 at a clean end of input.
  int tag() {
    const int c = is_.get();
    return c == std::char_traits<char>::eof() ? -1 : c;
  }

 private:
  std::istream& is_;
};

}  // namespace

std::uint64_t encode(const Factorization& f, std::ostream& sink) {
  Writer w(sink);
  w.bytes(kCodedMagic, sizeof kCodedMagic);
  w.u64(f.text_length());
  w.u64(f.theta());
  for (const Factor& fac : f.factors()) {
    if (fac.is_reference()) {
      w.u8(kReferenceTag);
      w.u64(fac.src);
      w.u64(fac.len);
    } else {
      w.u8(kLiteralTag);
      w.u64(fac.len);
      const auto lit = f.literal_bytes(fac);
      w.bytes(lit.data(), lit.size());
    }
  }
  sink.flush();
  if (!sink) throw IoError("writing the coded file failed");
  return w.count();
}

std::vector<std::uint8_t> encode(const Factorization& f) {
  std::ostringstream os(std::ios::binary);
  encode(f, os);
  const std::string s = std::move(os).str();
  return {s.begin(), s.end()};
}

Factorization decode(std::istream& source) {
  Reader r(source);
  char magic[sizeof kCodedMagic];
  source.read(magic, sizeof magic);
  if (source.gcount() != static_cast<std::streamsize>(sizeof magic) ||
      std::memcmp(magic, kCodedMagic, sizeof magic) != 0) {
    throw FormatError(FormatErrorCode::bad_magic, "not a PLCPZ001 file");
  }
  const std::uint64_t n = r.u64("the header");
  Factorization f(r.u64("the header"));

  std::vector<std::uint8_t> buffer;
  for (int tag = r.tag(); tag != -1; tag = r.tag()) {
    const std::uint64_t at = f.text_length() + 1;
    if (tag == kLiteralTag) {
      const std::uint64_t len = r.u64("a literal record");
      if (len == 0 || len > n - f.text_length()) {
        throw FormatError(FormatErrorCode::length_mismatch,
                          "literal at " + std::to_string(at) + " exceeds n");
      }
      buffer.resize(len);
      r.bytes(buffer.data(), len, "a literal record");
      f.append_literal(buffer, false);
    } else if (tag == kReferenceTag) {
      const std::uint64_t src = r.u64("a reference record");
      const std::uint64_t len = r.u64("a reference record");
      if (len == 0 || len > n - f.text_length()) {
        throw FormatError(FormatErrorCode::length_mismatch,
                          "reference at " + std::to_string(at) + " exceeds n");
      }
      if (src == 0 || src > n || len > n - src + 1 || src == at) {
        throw FormatError(FormatErrorCode::out_of_bounds,
                          "reference at " + std::to_string(at) + " to " + std::to_string(src));
      }
      f.append_reference(src, len);
    } else {
      throw FormatError(FormatErrorCode::bad_tag, "tag " + std::to_string(tag) + " at position " +
                                                      std::to_string(at));
    }
  }
  if (f.text_length() != n) {
    throw FormatError(FormatErrorCode::truncated,
                      "records cover " + std::to_string(f.text_length()) + " of " +
                          std::to_string(n) + " bytes");
  }
  return f;
}

Factorization decode(std::span<const std::uint8_t> bytes) {
  std::istringstream is(std::string(bytes.begin(), bytes.end()), std::ios::binary);
  return decode(is);
}

}  // namespace plcpcomp
