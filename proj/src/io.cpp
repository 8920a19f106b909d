#include "tgflock/io.hpp"

#include <openssl/evp.h>

#include <charconv>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "tgflock/error.hpp"

namespace tgflock {

std::string format_double(double value) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, res.ptr);
}

std::string graph_to_json(const WeightedDigraph& g) {
    nlohmann::json j;
    j["n"] = g.size();
    j["weights"] = g.weights().to_rows();
    return j.dump();
}

WeightedDigraph graph_from_json(std::string_view text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::ParseError, std::string("graph JSON: ") + e.what());
    }
    if (!j.is_object() || !j.contains("weights")) throw Error(ErrorKind::ParseError, "graph JSON needs a weights array");
    std::vector<std::vector<double>> rows;
    try {
        rows = j.at("weights").get<std::vector<std::vector<double>>>();
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::ParseError, std::string("graph weights: ") + e.what());
    }
    if (j.contains("n") && j.at("n").get<std::size_t>() != rows.size()) {
        throw Error(ErrorKind::DimensionMismatch, "graph JSON n differs from the weight rows");
    }
    return WeightedDigraph(DenseMatrix::from_rows(rows));
}

std::string graph_to_edge_csv(const WeightedDigraph& g) {
    std::string out = "i,j,w\n";
    for (std::size_t i = 0; i < g.size(); ++i) {
        for (std::size_t j = 0; j < g.size(); ++j) {
            if (!g.has_edge(i, j)) continue;
            out += std::to_string(i) + ',' + std::to_string(j) + ',' + format_double(g.weight(i, j)) + '\n';
        }
    }
    return out;
}

WeightedDigraph graph_from_edge_csv(std::string_view text, std::optional<std::size_t> n) {
    struct Edge {
        std::size_t i, j;
        double w;
    };
    std::vector<Edge> edges;
    std::size_t largest = 0;
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || (line_no == 1 && line.rfind("i,", 0) == 0)) continue;
        Edge e{};
        const char* p = line.data();
        const char* end = p + line.size();
        auto field = [&](auto& target) {
            const auto r = std::from_chars(p, end, target);
            if (r.ec != std::errc{}) throw Error(ErrorKind::ParseError, "edge CSV line " + std::to_string(line_no));
            p = r.ptr;
            if (p != end && *p == ',') ++p;
        };
        field(e.i);
        field(e.j);
        field(e.w);
        if (p != end) throw Error(ErrorKind::ParseError, "edge CSV line " + std::to_string(line_no));
        largest = std::max({largest, e.i + 1, e.j + 1});
        edges.push_back(e);
    }
    const std::size_t size = n.value_or(largest);
    if (size < largest || size == 0) throw Error(ErrorKind::DimensionMismatch, "edge index exceeds the vertex count");
    WeightedDigraph g(size);
    for (const auto& e : edges) g.set_weight(e.i, e.j, e.w);
    return g;
}

std::string metric_series_csv(const MetricSeries& series) {
    std::string out = "t,value\n";
    for (std::size_t k = 0; k < series.times.size(); ++k) {
        out += format_double(series.times[k]) + ',' + format_double(series.values[k]) + '\n';
    }
    return out;
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::IoFailure, "cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error(ErrorKind::IoFailure, "cannot write " + tmp.string());
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) throw Error(ErrorKind::IoFailure, "short write to " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw Error(ErrorKind::IoFailure, "cannot rename onto " + path.string() + ": " + ec.message());
}

std::string sha256_hex(std::string_view content) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(content.data(), content.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
        throw Error(ErrorKind::IoFailure, "SHA-256 failed");
    }
    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    out.reserve(2 * len);
    for (unsigned int k = 0; k < len; ++k) {
        out += hex[digest[k] >> 4];
        out += hex[digest[k] & 0xF];
    }
    return out;
}

}  // namespace tgflock
