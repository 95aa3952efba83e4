#include "egcnet/json_io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace egcnet {

namespace {

Matrix matrix_from_json(const Json& j, const char* what) {
  if (!j.is_array() || j.empty())
    throw ParseError(std::string(what) + ": matrix must be a non-empty array of rows");
  const int rows = static_cast<int>(j.size());
  if (!j[0].is_array())
    throw ParseError(std::string(what) + ": matrix rows must be arrays");
  const int cols = static_cast<int>(j[0].size());
  Matrix m(rows, cols);
  for (int i = 0; i < rows; ++i) {
    if (!j[i].is_array() || static_cast<int>(j[i].size()) != cols)
      throw ParseError(std::string(what) + ": ragged matrix");
    for (int c = 0; c < cols; ++c) {
      if (!j[i][c].is_number())
        throw ParseError(std::string(what) + ": matrix entries must be numbers");
      double v = j[i][c].get<double>();
      // JSON round-trip noise: tiny negatives are clamped on load.
      if (v < 0 && v >= -1e-12) v = 0.0;
      m(i, c) = v;
    }
  }
  return m;
}

Segment segment_from_json(const Json& j, const char* what) {
  if (!j.is_object() || !j.contains("duration") || !j.contains("matrix"))
    throw ParseError(std::string(what) + ": segment needs duration and matrix");
  if (!j["duration"].is_number())
    throw ParseError(std::string(what) + ": duration must be a number");
  Segment seg;
  seg.duration = j["duration"].get<double>();
  seg.matrix = matrix_from_json(j["matrix"], what);
  return seg;
}

Json segment_to_json(const Segment& seg) {
  Json j;
  j["duration"] = seg.duration;
  j["matrix"] = matrix_to_json(seg.matrix);
  return j;
}

void dump_value(const Json& j, std::string& out, int indent, int depth);

void dump_indent(std::string& out, int indent, int depth) {
  if (indent > 0) {
    out.push_back('\n');
    out.append(static_cast<std::size_t>(indent) * depth, ' ');
  }
}

void dump_number(const Json& j, std::string& out) {
  if (j.is_number_integer()) {
    out += std::to_string(j.get<long long>());
  } else if (j.is_number_unsigned()) {
    out += std::to_string(j.get<unsigned long long>());
  } else {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", j.get<double>());
    out += buf;
  }
}

void dump_value(const Json& j, std::string& out, int indent, int depth) {
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) { out += "{}"; break; }
      out.push_back('{');
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out.push_back(',');
        first = false;
        dump_indent(out, indent, depth + 1);
        out += Json(it.key()).dump();
        out += indent > 0 ? ": " : ":";
        dump_value(it.value(), out, indent, depth + 1);
      }
      dump_indent(out, indent, depth);
      out.push_back('}');
      break;
    }
    case Json::value_t::array: {
      if (j.empty()) { out += "[]"; break; }
      out.push_back('[');
      bool first = true;
      for (const auto& v : j) {
        if (!first) out.push_back(',');
        first = false;
        dump_indent(out, indent, depth + 1);
        dump_value(v, out, indent, depth + 1);
      }
      dump_indent(out, indent, depth);
      out.push_back(']');
      break;
    }
    case Json::value_t::number_integer:
    case Json::value_t::number_unsigned:
    case Json::value_t::number_float:
      dump_number(j, out);
      break;
    default:
      out += j.dump();
  }
}

}  // namespace

Json matrix_to_json(const Matrix& m) {
  Json rows = Json::array();
  for (int i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (int c = 0; c < m.cols(); ++c) row.push_back(m(i, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

Json vector_to_json(const Vector& v) {
  Json out = Json::array();
  for (int i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

Chain chain_from_json(const Json& j) {
  if (!j.is_object()) throw ParseError("chain: top level must be an object");
  for (const char* key : {"mode", "n", "prefix", "tail"}) {
    if (!j.contains(key)) throw ParseError(std::string("chain: missing key ") + key);
  }
  Chain chain;
  std::string mode = j["mode"].is_string() ? j["mode"].get<std::string>() : "";
  if (mode == "continuous") {
    chain.mode = TimeMode::Continuous;
  } else if (mode == "discrete") {
    chain.mode = TimeMode::Discrete;
  } else {
    throw ParseError("chain: mode must be \"continuous\" or \"discrete\"");
  }
  if (!j["n"].is_number_integer() || j["n"].get<int>() <= 0)
    throw ParseError("chain: n must be a positive integer");
  chain.n_agents = j["n"].get<int>();

  if (!j["prefix"].is_array()) throw ParseError("chain: prefix must be an array");
  for (const auto& seg : j["prefix"]) {
    chain.prefix.push_back(segment_from_json(seg, "prefix"));
  }

  const Json& tail = j["tail"];
  if (!tail.is_object() || !tail.contains("kind"))
    throw ParseError("chain: tail needs a kind");
  std::string kind = tail["kind"].is_string() ? tail["kind"].get<std::string>() : "";
  if (kind == "zero") {
    chain.tail = ZeroTail{};
  } else if (kind == "periodic") {
    if (!tail.contains("block") || !tail["block"].is_array())
      throw ParseError("chain: periodic tail needs a block array");
    PeriodicTail p;
    for (const auto& seg : tail["block"]) {
      p.block.push_back(segment_from_json(seg, "tail block"));
    }
    chain.tail = std::move(p);
  } else {
    throw ParseError("chain: tail kind must be \"zero\" or \"periodic\"");
  }
  return chain;
}

Json chain_to_json(const Chain& chain) {
  Json j;
  j["mode"] = to_string(chain.mode);
  j["n"] = chain.n_agents;
  Json prefix = Json::array();
  for (const auto& seg : chain.prefix) prefix.push_back(segment_to_json(seg));
  j["prefix"] = std::move(prefix);
  Json tail;
  if (const auto* p = chain.periodic_tail()) {
    tail["kind"] = "periodic";
    Json block = Json::array();
    for (const auto& seg : p->block) block.push_back(segment_to_json(seg));
    tail["block"] = std::move(block);
  } else {
    tail["kind"] = "zero";
  }
  j["tail"] = std::move(tail);
  return j;
}

Chain load_chain_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  Json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("JSON parse failure: ") + e.what());
  }
  return chain_from_json(j);
}

std::string dump_json_17(const Json& j, int indent) {
  std::string out;
  dump_value(j, out, indent, 0);
  out.push_back('\n');
  return out;
}

void atomic_write_file(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << content;
    if (!out.good()) {
      std::error_code ec;
      fs::remove(tmp, ec);
      throw std::runtime_error("write failed for " + tmp.string());
    }
  }
  fs::rename(tmp, target);
}

}  // namespace egcnet
