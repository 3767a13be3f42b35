#include "mtensor/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

namespace mtensor {

using nlohmann::json;

namespace {

const json& require(const json& doc, const char* field) {
  if (!doc.is_object()) throw FormatError("document is not a JSON object");
  const auto it = doc.find(field);
  if (it == doc.end()) throw FormatError(std::string("missing field '") + field + "'");
  return *it;
}

int require_int(const json& doc, const char* field) {
  const json& v = require(doc, field);
  if (!v.is_number_integer()) throw FormatError(std::string("field '") + field + "' must be an integer");
  return v.get<int>();
}

void check_format(const json& doc) {
  const auto it = doc.find("format");
  if (it != doc.end() && (!it->is_number_integer() || it->get<int>() != kFormatVersion)) {
    throw FormatError("field 'format' must be " + std::to_string(kFormatVersion));
  }
}

Vector vector_from_json(const json& v, const std::string& field, int n) {
  if (!v.is_array()) throw FormatError("field '" + field + "' must be an array");
  if (static_cast<int>(v.size()) != n) {
    throw FormatError("field '" + field + "' has " + std::to_string(v.size()) + " components, expected " +
                      std::to_string(n));
  }
  Vector out(n);
  for (int i = 0; i < n; ++i) {
    const json& c = v[static_cast<std::size_t>(i)];
    if (!c.is_number() || !std::isfinite(c.get<double>())) {
      throw FormatError("field '" + field + "[" + std::to_string(i) + "]' must be a finite number");
    }
    out[i] = c.get<double>();
  }
  return out;
}

json vector_to_json(const Vector& v) { return json(std::vector<double>(v.begin(), v.end())); }

}  // namespace

json tensor_to_json(const SquareTensor& A) {
  const SquareTensor C = A.canonicalized();
  json entries = json::array();
  for (std::size_t k = 0; k < C.nnz(); ++k) {
    json row = json::array();
    for (Index i : C.tuple(k)) row.push_back(i);
    row.push_back(C.value(k));
    entries.push_back(std::move(row));
  }
  return json{{"format", kFormatVersion}, {"m", C.order()}, {"n", C.dim()}, {"entries", std::move(entries)}};
}

SquareTensor tensor_from_json(const json& doc) {
  check_format(doc);
  const int m = require_int(doc, "m");
  const int n = require_int(doc, "n");
  if (m < 3) throw FormatError("field 'm' must be at least 3");
  if (n < 1) throw FormatError("field 'n' must be at least 1");
  const json& entries = require(doc, "entries");
  if (!entries.is_array()) throw FormatError("field 'entries' must be an array");

  const auto mm = static_cast<std::size_t>(m);
  std::vector<Index> idx;
  std::vector<double> val;
  idx.reserve(entries.size() * mm);
  val.reserve(entries.size());
  for (std::size_t k = 0; k < entries.size(); ++k) {
    const json& e = entries[k];
    const std::string where = "entries[" + std::to_string(k) + "]";
    if (!e.is_array() || e.size() != mm + 1) {
      throw FormatError("field '" + where + "' must hold " + std::to_string(m) + " indices and a value");
    }
    for (std::size_t t = 0; t < mm; ++t) {
      if (!e[t].is_number_integer()) throw FormatError("field '" + where + "' has a non-integer index");
      const auto i = e[t].get<long long>();
      if (i < 0 || i >= n) throw FormatError("field '" + where + "' has index " + std::to_string(i) + " outside [0, n)");
      idx.push_back(static_cast<Index>(i));
    }
    if (!e[mm].is_number() || !std::isfinite(e[mm].get<double>())) {
      throw FormatError("field '" + where + "' has a non-finite value");
    }
    val.push_back(e[mm].get<double>());
  }
  return SquareTensor::from_coordinates(m, n, std::move(idx), std::move(val));
}

json instance_to_json(const ProblemInstance& inst) {
  json doc = tensor_to_json(inst.A);
  doc["b"] = vector_to_json(inst.b);
  doc["planted"] = inst.planted ? vector_to_json(*inst.planted) : json(nullptr);
  doc["seed"] = inst.seed;
  doc["recipe"] = inst.recipe;
  return doc;
}

ProblemInstance instance_from_json(const json& doc) {
  ProblemInstance inst;
  inst.A = tensor_from_json(doc);
  const int n = inst.A.dim();
  inst.b = vector_from_json(require(doc, "b"), "b", n);
  if (const auto it = doc.find("planted"); it != doc.end() && !it->is_null()) {
    inst.planted = vector_from_json(*it, "planted", n);
  }
  if (const auto it = doc.find("seed"); it != doc.end()) {
    if (!it->is_number_unsigned()) throw FormatError("field 'seed' must be a nonnegative integer");
    inst.seed = it->get<std::uint64_t>();
  }
  if (const auto it = doc.find("recipe"); it != doc.end()) {
    if (!it->is_string()) throw FormatError("field 'recipe' must be a string");
    inst.recipe = it->get<std::string>();
  }
  return inst;
}

ProblemInstance load_instance(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
  return instance_from_json(doc);
}

void save_instance(const std::filesystem::path& path, const ProblemInstance& inst) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << instance_to_json(inst).dump() << '\n';
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

std::string format_real(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.16e", value);
  return buf;
}

void write_trace_csv(std::ostream& out, const std::vector<IterationRecord>& trace) {
  out << "iter,ReErr,card_I,p,q\n";
  for (const auto& r : trace) {
    out << r.iter << ',' << format_real(r.re_err) << ',' << r.card_I << ',' << r.p << ',' << r.q << '\n';
  }
}

json report_to_json(const SolveReport& report) {
  json trace = json::array();
  for (const auto& r : report.trace) {
    trace.push_back({{"iter", r.iter},
                     {"x_norm", r.x_norm},
                     {"ReErr", r.re_err},
                     {"j", r.j},
                     {"card_I", r.card_I},
                     {"card_Ibar", r.card_Ibar},
                     {"card_J", r.card_J},
                     {"p", r.p},
                     {"q", r.q}});
  }
  return json{{"format", kFormatVersion},
              {"status", std::string(to_string(report.status))},
              {"x", vector_to_json(report.x)},
              {"ReErr", report.re_err},
              {"iterations", report.iterations},
              {"kappa", report.kappa},
              {"eps_active", report.eps_active},
              {"bootstrapped", report.bootstrapped},
              {"message", report.message},
              {"violations", report.violations},
              {"wall_seconds", report.wall_seconds},
              {"trace", std::move(trace)}};
}

Vector parse_vector(std::string_view text) {
  std::vector<double> values;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t comma = text.find(',', start);
    const std::string item(text.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      throw FormatError("cannot parse '" + item + "' as a number");
    }
    if (used != item.size() || !std::isfinite(v)) throw FormatError("cannot parse '" + item + "' as a number");
    values.push_back(v);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return Eigen::Map<const Vector>(values.data(), static_cast<Eigen::Index>(values.size()));
}

}  // namespace mtensor
