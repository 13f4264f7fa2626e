#pragma once

#include <iosfwd>
#include <string>
#include <string_view>

#include "json.hpp"

#include "fastmapd/embedder.hpp"

namespace fmd {

/// CSV with header `vertex,c1,...,c{k+1}`; the last column is the potential.
void write_embedding_csv(std::ostream& out, const Embedding& emb);

/// Sidecar metadata: k, pivots, seed and the embedding configuration.
nlohmann::json embedding_metadata(const Embedding& emb);

/// Reads the CSV; pivots/config/stats come from the optional sidecar.
Embedding read_embedding(std::string_view csv, const nlohmann::json* sidecar = nullptr);
Embedding read_embedding_files(const std::string& csv_path);

/// Writes `path` and `path + ".json"`.
void write_embedding_files(const std::string& path, const Embedding& emb);

} // namespace fmd
