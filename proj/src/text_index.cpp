#include "plcpcomp/text_index.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>
#include <limits>

#include "plcpcomp/errors.hpp"
#include "plcpcomp/suffix_array.hpp"

namespace plcpcomp {

namespace {

constexpr char kIndexMagic[8] = {'P', 'L', 'C', 'P', 'I', 'D', 'X', '1'};

void check_sentinel(std::span<const std::uint8_t> bytes) {
  if (bytes.empty() || bytes.back() != 0) {
    throw InputError("text must end with the sentinel byte 0");
  }
  const auto first_zero = std::find(bytes.begin(), bytes.end(), std::uint8_t{0});
  if (first_zero != bytes.end() - 1) {
    throw InputError("byte 0 at position " +
                     std::to_string(first_zero - bytes.begin() + 1) +
                     " collides with the sentinel");
  }
}

// Phi and PLCP in text order from a 0-based suffix array. PLCP overwrites
// Phi slot by slot, so `phi_out` receives Phi before it is lost.
template <class Index, class OnPhi>
std::vector<Index> phi_and_plcp(std::span<const std::uint8_t> t,
                                const std::vector<Index>& sa, OnPhi on_phi) {
  const std::size_t n = t.size();
  std::vector<Index> arr(n);
  arr[sa[0]] = sa[n - 1];
  for (std::size_t k = 1; k < n; ++k) arr[sa[k]] = sa[k - 1];
  for (std::size_t i = 0; i < n; ++i) on_phi(static_cast<std::uint64_t>(arr[i]) + 1);

  const std::size_t first = sa[0];
  std::size_t l = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (i == first) {
      arr[i] = 0;
      l = 0;
      continue;
    }
    const std::size_t j = arr[i];
    while (i + l < n && j + l < n && t[i + l] == t[j + l]) ++l;
    arr[i] = static_cast<Index>(l);
    if (l > 0) --l;
  }
  return arr;
}

template <class Index>
std::uint64_t count_bwt_runs(std::span<const std::uint8_t> t,
                             const std::vector<Index>& sa) {
  const std::size_t n = t.size();
  std::uint64_t runs = 0;
  int prev = -1;
  for (std::size_t k = 0; k < n; ++k) {
    const int c = sa[k] == 0 ? t[n - 1] : t[sa[k] - 1];
    if (c != prev) ++runs;
    prev = c;
  }
  return runs;
}

template <class Index>
StreamIndex build_stream_index_as(const Text& text, const stream::MemoryBudget& budget) {
  StreamIndex out{text.size(), 0, stream::TupleStream<std::uint64_t>(budget),
                  stream::TupleStream<std::uint64_t>(budget)};
  std::vector<Index> plcp;
  {
    const std::vector<Index> sa = build_suffix_array<Index>(text.bytes());
    out.bwt_runs = count_bwt_runs(text.bytes(), sa);
    plcp = phi_and_plcp(text.bytes(), sa, [&](std::uint64_t v) { out.phi.push(v); });
  }
  out.phi.finalize();
  for (Index v : plcp) out.plcp.push(v);
  out.plcp.finalize();
  return out;
}

void write_u64(std::ofstream& os, std::uint64_t v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof v);
}

std::uint64_t read_u64(std::ifstream& is) {
  std::uint64_t v = 0;
  if (!is.read(reinterpret_cast<char*>(&v), sizeof v)) {
    throw IoError("index file is truncated");
  }
  return v;
}

}  // namespace

Text Text::from_bytes(std::span<const std::uint8_t> raw) {
  std::vector<std::uint8_t> bytes(raw.begin(), raw.end());
  if (bytes.empty() || bytes.back() != 0) bytes.push_back(0);
  return from_terminated(std::move(bytes));
}

Text Text::from_string(std::string_view raw) {
  return from_bytes(std::span(reinterpret_cast<const std::uint8_t*>(raw.data()), raw.size()));
}

Text Text::from_terminated(std::vector<std::uint8_t> bytes) {
  check_sentinel(bytes);
  Text t;
  t.bytes_ = std::move(bytes);
  return t;
}

IndexBundle build_index(const Text& text) {
  check_sentinel(text.bytes());
  const std::uint64_t n = text.size();
  const std::vector<std::uint64_t> sa0 = build_suffix_array<std::uint64_t>(text.bytes());

  IndexBundle b;
  b.bwt_runs = count_bwt_runs(text.bytes(), sa0);
  b.sa.resize(n);
  b.isa.resize(n);
  for (std::uint64_t k = 0; k < n; ++k) {
    b.sa[k] = sa0[k] + 1;
    b.isa[sa0[k]] = k + 1;
  }
  b.phi.reserve(n);
  b.plcp = phi_and_plcp(text.bytes(), sa0, [&](std::uint64_t v) { b.phi.push_back(v); });
  return b;
}

std::vector<std::uint64_t> lcp_from_plcp(const IndexBundle& index) {
  std::vector<std::uint64_t> lcp(index.size());
  for (std::size_t k = 0; k < lcp.size(); ++k) lcp[k] = index.plcp[index.sa[k] - 1];
  return lcp;
}

StreamIndex build_stream_index(const Text& text, const stream::MemoryBudget& budget) {
  check_sentinel(text.bytes());
  if (text.size() < std::numeric_limits<std::uint32_t>::max() / 2) {
    return build_stream_index_as<std::uint32_t>(text, budget);
  }
  return build_stream_index_as<std::uint64_t>(text, budget);
}

StreamIndex stream_index_of(const IndexBundle& index, const stream::MemoryBudget& budget) {
  return StreamIndex{index.size(), index.bwt_runs,
                     stream::TupleStream<std::uint64_t>::from_vector(index.phi, budget),
                     stream::TupleStream<std::uint64_t>::from_vector(index.plcp, budget)};
}

void save_index(const IndexBundle& index, const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw IoError("cannot open " + path.string() + " for writing");
  os.write(kIndexMagic, sizeof kIndexMagic);
  write_u64(os, index.size());
  write_u64(os, index.bwt_runs);
  for (const auto* arr : {&index.sa, &index.isa, &index.phi, &index.plcp}) {
    os.write(reinterpret_cast<const char*>(arr->data()),
             static_cast<std::streamsize>(arr->size() * sizeof(std::uint64_t)));
  }
  if (!os) throw IoError("write to " + path.string() + " failed");
}

IndexBundle load_index(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open " + path.string());
  char magic[8];
  if (!is.read(magic, sizeof magic) || std::memcmp(magic, kIndexMagic, sizeof magic) != 0) {
    throw IoError(path.string() + " is not an index file");
  }
  const std::uint64_t n = read_u64(is);
  IndexBundle b;
  b.bwt_runs = read_u64(is);
  for (auto* arr : {&b.sa, &b.isa, &b.phi, &b.plcp}) {
    arr->resize(n);
    if (!is.read(reinterpret_cast<char*>(arr->data()),
                 static_cast<std::streamsize>(n * sizeof(std::uint64_t)))) {
      throw IoError("index file is truncated");
    }
  }
  return b;
}

}  // namespace plcpcomp
