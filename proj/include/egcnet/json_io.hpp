#pragma once

#include "egcnet/chain.hpp"

#include <json.hpp>

#include <stdexcept>
#include <string>

namespace egcnet {

using Json = nlohmann::ordered_json;

struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Chain file schema:
/// {"mode": "continuous"|"discrete", "n": N,
///  "prefix": [{"duration": d, "matrix": [[...]]}],
///  "tail": {"kind": "zero"} | {"kind": "periodic", "block": [segments]}}
/// Matrices row-major. Entries in [-1e-12, 0) are clamped to 0 on load.
Chain chain_from_json(const Json& j);
Json chain_to_json(const Chain& chain);

Chain load_chain_file(const std::string& path);

/// Serializes with fixed field order and doubles at 17 significant
/// digits, so identical values give byte-identical output and every
/// double round-trips exactly.
std::string dump_json_17(const Json& j, int indent = 2);

/// Write-to-temp plus atomic rename; no partial files on error.
void atomic_write_file(const std::string& path, const std::string& content);

Json matrix_to_json(const Matrix& m);
Json vector_to_json(const Vector& v);

}  // namespace egcnet
