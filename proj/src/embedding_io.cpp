#include "fastmapd/embedding_io.hpp"

#include <charconv>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <ostream>
#include <vector>

#include "fastmapd/errors.hpp"
#include "fastmapd/graph_io.hpp"

namespace fmd {

void write_embedding_csv(std::ostream& out, const Embedding& emb)
{
    out << "vertex";
    for (Eigen::Index c = 0; c < emb.coords.cols(); ++c)
        out << ",c" << c + 1;
    out << '\n' << std::setprecision(std::numeric_limits<double>::max_digits10);
    for (Eigen::Index v = 0; v < emb.coords.rows(); ++v) {
        out << v;
        for (Eigen::Index c = 0; c < emb.coords.cols(); ++c)
            out << ',' << emb.coords(v, c);
        out << '\n';
    }
}

nlohmann::json embedding_metadata(const Embedding& emb)
{
    nlohmann::json pivots = nlohmann::json::array();
    for (const auto& p : emb.pivots)
        pivots.push_back({p.a, p.b});
    return {
        {"k", emb.k},
        {"vertices", emb.coords.rows()},
        {"pivots", pivots},
        {"seed", emb.config.seed},
        {"config",
         {{"k_max", emb.config.k_max},
          {"epsilon", emb.config.epsilon},
          {"pivot_iters", emb.config.pivot_iters},
          {"enhancements", emb.config.enhancements}}},
        {"stats",
         {{"average_distance_calls", emb.stats.average_distance_calls},
          {"clamped_residuals", emb.stats.clamped_residuals},
          {"reassignments", emb.stats.reassignments},
          {"fallbacks", emb.stats.fallbacks}}},
    };
}

Embedding read_embedding(std::string_view csv, const nlohmann::json* sidecar)
{
    std::vector<std::vector<double>> rows;
    std::size_t columns = 0;
    std::size_t line_no = 0;
    std::size_t start = 0;
    while (start < csv.size()) {
        auto end = csv.find('\n', start);
        if (end == std::string_view::npos)
            end = csv.size();
        std::string_view line = csv.substr(start, end - start);
        start = end + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r')
            line.remove_suffix(1);
        if (line.empty())
            continue;
        std::vector<std::string_view> fields;
        for (std::size_t s = 0;;) {
            const auto comma = line.find(',', s);
            fields.push_back(line.substr(s, comma == std::string_view::npos ? std::string_view::npos : comma - s));
            if (comma == std::string_view::npos)
                break;
            s = comma + 1;
        }
        if (line_no == 1) {
            if (fields.size() < 3 || fields[0] != "vertex")
                throw ParseError("expected header 'vertex,c1,...,c{k+1}' with at least two coordinates", line_no);
            columns = fields.size() - 1;
            continue;
        }
        if (fields.size() != columns + 1)
            throw ParseError("expected " + std::to_string(columns + 1) + " fields", line_no);
        std::size_t vertex = 0;
        if (std::from_chars(fields[0].data(), fields[0].data() + fields[0].size(), vertex).ec != std::errc{}
            || vertex != rows.size())
            throw ParseError("vertices must be listed in order starting at 0", line_no);
        std::vector<double> row(columns);
        for (std::size_t c = 0; c < columns; ++c) {
            const auto f = fields[c + 1];
            const auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), row[c]);
            if (ec != std::errc{} || ptr != f.data() + f.size())
                throw ParseError("invalid coordinate '" + std::string(f) + "'", line_no);
        }
        rows.push_back(std::move(row));
    }
    if (columns == 0)
        throw ParseError("empty embedding file", 1);

    Embedding emb;
    emb.k = static_cast<int>(columns) - 1;
    emb.coords.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(columns));
    for (std::size_t v = 0; v < rows.size(); ++v)
        for (std::size_t c = 0; c < columns; ++c)
            emb.coords(static_cast<Eigen::Index>(v), static_cast<Eigen::Index>(c)) = rows[v][c];
    emb.config.k_max = emb.k + 1;

    if (sidecar) {
        const auto& meta = *sidecar;
        if (meta.at("k").get<int>() != emb.k)
            throw ParseError("sidecar k does not match the CSV column count");
        for (const auto& p : meta.at("pivots"))
            emb.pivots.push_back({p.at(0).get<VertexId>(), p.at(1).get<VertexId>()});
        emb.config.seed = meta.at("seed").get<std::uint64_t>();
        const auto& cfg = meta.at("config");
        emb.config.k_max = cfg.at("k_max").get<int>();
        emb.config.epsilon = cfg.at("epsilon").get<double>();
        emb.config.pivot_iters = cfg.at("pivot_iters").get<int>();
        emb.config.enhancements = cfg.at("enhancements").get<bool>();
        if (meta.contains("stats")) {
            const auto& st = meta["stats"];
            emb.stats.average_distance_calls = st.value("average_distance_calls", std::size_t{0});
            emb.stats.clamped_residuals = st.value("clamped_residuals", std::size_t{0});
            emb.stats.reassignments = st.value("reassignments", std::size_t{0});
            emb.stats.fallbacks = st.value("fallbacks", std::size_t{0});
        }
    }
    return emb;
}

Embedding read_embedding_files(const std::string& csv_path)
{
    const std::string csv = read_text_file(csv_path);
    const std::string sidecar_path = csv_path + ".json";
    if (!std::filesystem::exists(sidecar_path))
        return read_embedding(csv);
    nlohmann::json meta;
    try {
        meta = nlohmann::json::parse(read_text_file(sidecar_path));
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(sidecar_path + ": " + e.what());
    }
    return read_embedding(csv, &meta);
}

void write_embedding_files(const std::string& path, const Embedding& emb)
{
    std::ofstream csv(path, std::ios::binary);
    if (!csv)
        throw std::ios_base::failure("cannot write '" + path + "'");
    write_embedding_csv(csv, emb);
    std::ofstream meta(path + ".json", std::ios::binary);
    if (!meta)
        throw std::ios_base::failure("cannot write '" + path + ".json'");
    meta << embedding_metadata(emb).dump(2) << '\n';
}

} // namespace fmd
