#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>

#include "plcpcomp/codec.hpp"
#include "plcpcomp/decompressor.hpp"
#include "plcpcomp/errors.hpp"
#include "plcpcomp/factorizer.hpp"
#include "plcpcomp/scheme_oracle.hpp"

namespace py = pybind11;
using namespace plcpcomp;

namespace {

std::span<const std::uint8_t> view(const py::bytes& b) {
  const std::string_view s = b;
  return {reinterpret_cast<const std::uint8_t*>(s.data()), s.size()};
}

py::bytes to_bytes(std::span<const std::uint8_t> s) {
  return py::bytes(reinterpret_cast<const char*>(s.data()), s.size());
}

stream::MemoryBudget budget_of(std::optional<std::uint64_t> mem) {
  stream::MemoryBudget b =
      mem ? stream::MemoryBudget::of_bytes(*mem) : stream::MemoryBudget::unbounded();
  b.validate();
  return b;
}

Factorization compress_text(const Text& text, std::uint64_t theta,
                            std::optional<std::uint64_t> mem, CompressionMetrics* metrics) {
  const stream::MemoryBudget budget = budget_of(mem);
  StreamIndex index = build_stream_index(text, budget);
  return pipeline_compress(text, index, theta, budget, metrics);
}

}  // namespace

PYBIND11_MODULE(_plcpcomp, m) {
  m.doc() = "Bidirectional text compression over PLCP streams";

  static py::exception<CodingError> coding_error(m, "CodingError", PyExc_ValueError);
  static py::exception<FormatError> format_error(m, "FormatError", coding_error.ptr());
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const FormatError& e) {
      PyErr_SetString(format_error.ptr(), e.what());
    } catch (const CodingError& e) {
      PyErr_SetString(coding_error.ptr(), e.what());
    } catch (const IoError& e) {
      PyErr_SetString(PyExc_OSError, e.what());
    } catch (const Error& e) {
      PyErr_SetString(PyExc_ValueError, e.what());
    }
  });

  m.def(
      "compress",
      [](const py::bytes& data, std::uint64_t theta, std::optional<std::uint64_t> mem) {
        std::vector<std::uint8_t> coded;
        {
          const Text text = Text::from_bytes(view(data));
          py::gil_scoped_release release;
          coded = encode(compress_text(text, theta, mem, nullptr));
        }
        return to_bytes(coded);
      },
      py::arg("data"), py::arg("theta") = 2, py::arg("mem") = py::none(),
      "Compress bytes into the coded file format.");

  m.def(
      "decompress",
      [](const py::bytes& coded, const std::string& strategy, std::optional<std::uint64_t> mem) {
        const Factorization f = decode(view(coded));
        std::vector<std::uint8_t> text;
        {
          py::gil_scoped_release release;
          if (strategy == "oracle") {
            text = decompress_oracle(f);
          } else if (strategy == "pj") {
            text = decompress_pj(f, budget_of(mem));
          } else if (strategy == "compact-pj") {
            text = decompress_pj(compact_em(f, budget_of(mem)), budget_of(mem));
          } else {
            throw ConfigError("unknown strategy '" + strategy + "'");
          }
        }
        text.pop_back();
        return to_bytes(text);
      },
      py::arg("coded"), py::arg("strategy") = "pj", py::arg("mem") = py::none(),
      "Restore the original bytes; strategy is 'oracle', 'pj' or 'compact-pj'.");

  m.def(
      "factorize",
      [](const py::bytes& data, std::uint64_t theta) {
        const Text text = Text::from_bytes(view(data));
        const Factorization f = compress_text(text, theta, std::nullopt, nullptr);
        std::vector<std::tuple<std::uint64_t, std::uint64_t, std::uint64_t>> refs;
        for (const Factor& fac : f.factors()) {
          if (fac.is_reference()) refs.emplace_back(fac.dst, fac.src, fac.len);
        }
        return refs;
      },
      py::arg("data"), py::arg("theta") = 2,
      "References (dst, src, length) of the streaming factorization in text order.");

  m.def(
      "oracle_references",
      [](const py::bytes& data, std::uint64_t theta) {
        const Text text = Text::from_bytes(view(data));
        const SchemeResult r = scheme_factorize(text, build_index(text), theta);
        std::vector<std::tuple<std::uint64_t, std::uint64_t, std::uint64_t>> refs;
        for (const FactorTriple& t : r.discovery_order) refs.emplace_back(t.dst, t.src, t.len);
        return refs;
      },
      py::arg("data"), py::arg("theta") = 2,
      "References (dst, src, length) of the in-core greedy scheme in discovery order.");

  m.def(
      "build_index",
      [](const py::bytes& data) {
        const IndexBundle b = build_index(Text::from_bytes(view(data)));
        py::dict d;
        d["sa"] = b.sa;
        d["isa"] = b.isa;
        d["phi"] = b.phi;
        d["plcp"] = b.plcp;
        d["bwt_runs"] = b.bwt_runs;
        return d;
      },
      py::arg("data"), "SA, ISA, Phi and PLCP (1-based values) of data plus its sentinel.");

  m.def(
      "stats",
      [](const py::bytes& data, std::uint64_t theta, std::optional<std::uint64_t> mem) {
        const Text text = Text::from_bytes(view(data));
        CompressionMetrics metrics;
        const Factorization f = compress_text(text, theta, mem, &metrics);
        py::dict d;
        d["n"] = metrics.n;
        d["theta"] = metrics.theta;
        d["factors"] = f.factors().size();
        d["references"] = f.reference_count();
        d["factors_single_literals"] = f.factor_count_single_literals();
        d["max_list_size"] = metrics.max_list_size;
        d["bwt_runs"] = metrics.bwt_runs;
        d["spilled"] = metrics.spilled();
        return d;
      },
      py::arg("data"), py::arg("theta") = 2, py::arg("mem") = py::none(),
      "Compression counters for data.");

  m.def(
      "graph_stats",
      [](const py::bytes& coded) {
        const DepGraphStats g = graph_stats(decode(view(coded)));
        py::dict d;
        d["nodes"] = g.node_count;
        d["references"] = g.reference_count;
        d["edges"] = g.edge_count;
        d["multi_dependent"] = g.multi_dependent_count;
        d["max_out_degree"] = g.max_out_degree;
        d["depth"] = g.depth;
        return d;
      },
      py::arg("coded"), "Dependency graph census of a coded file.");

  m.def(
      "lower_bound_text",
      [](std::uint64_t symbols) {
        const Text t = lower_bound_text(symbols);
        return to_bytes(t.body());
      },
      py::arg("symbols"), "Text of length symbols^2 that maximizes the peak list.");
}
