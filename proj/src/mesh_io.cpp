#include "membrane/mesh_io.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "membrane/error.hpp"

namespace membrane {

namespace {

[[noreturn]] void parse_error(std::size_t line, const std::string& what) {
    std::ostringstream msg;
    msg << "parse error at line " << line << ": " << what;
    throw Error("mesh", msg.str());
}

// Reads whitespace-separated tokens, skipping '#' comments, tracking lines.
class OffTokens {
public:
    explicit OffTokens(const std::string& text) : in_(text) {}

    bool next(std::string& token) {
        while (true) {
            if (line_stream_ >> token) return true;
            std::string line;
            if (!std::getline(in_, line)) return false;
            ++line_no_;
            if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
            line_stream_.clear();
            line_stream_.str(line);
        }
    }

    std::string require(const char* what) {
        std::string token;
        if (!next(token)) parse_error(line_no_, std::string("unexpected end of file, expected ") + what);
        return token;
    }

    template <typename T>
    T number(const char* what) {
        const std::string token = require(what);
        std::istringstream conv(token);
        T value{};
        if (!(conv >> value) || !conv.eof()) parse_error(line_no_, "invalid " + std::string(what) + " '" + token + "'");
        return value;
    }

    std::size_t line() const noexcept { return line_no_; }

private:
    std::istringstream in_;
    std::istringstream line_stream_;
    std::size_t line_no_ = 0;
};

SurfaceMesh finish(std::vector<Vec3> vertices, std::vector<Triangle> triangles) {
    if (vertices.empty() || triangles.empty()) throw Error("mesh", "parse error: mesh is empty");
    std::vector<Vec3> normals(vertices.size(), Vec3::UnitZ());
    const SurfaceMesh raw(std::move(vertices), std::move(triangles), std::move(normals));
    return compute_nodal_normals(raw, NormalMode::averaged);
}

SurfaceMesh parse_off(const std::string& text) {
    OffTokens tokens(text);
    std::string header;
    if (!tokens.next(header)) parse_error(0, "empty file");
    if (header != "OFF") parse_error(tokens.line(), "missing OFF header");
    const auto nv = tokens.number<long long>("vertex count");
    const auto nf = tokens.number<long long>("face count");
    tokens.number<long long>("edge count");
    if (nv <= 0 || nf <= 0) parse_error(tokens.line(), "vertex and face counts must be positive");

    std::vector<Vec3> vertices(static_cast<std::size_t>(nv));
    for (auto& v : vertices) {
        v.x() = tokens.number<double>("coordinate");
        v.y() = tokens.number<double>("coordinate");
        v.z() = tokens.number<double>("coordinate");
    }
    std::vector<Triangle> triangles(static_cast<std::size_t>(nf));
    for (auto& t : triangles) {
        const auto arity = tokens.number<long long>("face size");
        if (arity != 3) parse_error(tokens.line(), "only triangular faces are supported");
        for (auto& idx : t) {
            const auto i = tokens.number<long long>("vertex index");
            if (i < 0 || i >= nv) parse_error(tokens.line(), "vertex index out of range");
            idx = static_cast<std::size_t>(i);
        }
    }
    return finish(std::move(vertices), std::move(triangles));
}

SurfaceMesh parse_obj(const std::string& text) {
    std::istringstream in(text);
    std::vector<Vec3> vertices;
    std::vector<Triangle> triangles;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::istringstream fields(line);
        std::string kind;
        if (!(fields >> kind)) continue;
        if (kind == "v") {
            Vec3 p;
            if (!(fields >> p.x() >> p.y() >> p.z())) parse_error(line_no, "malformed vertex");
            vertices.push_back(p);
        } else if (kind == "f") {
            std::vector<std::size_t> face;
            std::string ref;
            while (fields >> ref) {
                // "i", "i/t", "i//n" or "i/t/n"; negative indices are relative.
                const std::string head = ref.substr(0, ref.find('/'));
                long long i = 0;
                std::istringstream conv(head);
                if (!(conv >> i) || !conv.eof() || i == 0) parse_error(line_no, "bad face index '" + ref + "'");
                const long long count = static_cast<long long>(vertices.size());
                const long long resolved = i > 0 ? i - 1 : count + i;
                if (resolved < 0 || resolved >= count) parse_error(line_no, "face index out of range");
                face.push_back(static_cast<std::size_t>(resolved));
            }
            if (face.size() != 3) parse_error(line_no, "only triangular faces are supported");
            triangles.push_back({face[0], face[1], face[2]});
        }
    }
    if (vertices.empty() && triangles.empty()) parse_error(line_no, "empty file");
    return finish(std::move(vertices), std::move(triangles));
}

}  // namespace

MeshFormat mesh_format_from_path(const std::string& path) {
    const auto dot = path.rfind('.');
    std::string ext = dot == std::string::npos ? "" : path.substr(dot + 1);
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (ext == "off") return MeshFormat::off;
    if (ext == "obj") return MeshFormat::obj;
    throw Error("mesh", "unknown mesh extension in '" + path + "'");
}

SurfaceMesh parse_mesh(const std::string& text, MeshFormat format) {
    return format == MeshFormat::off ? parse_off(text) : parse_obj(text);
}

SurfaceMesh import_mesh(const std::string& path, MeshFormat format) {
    std::ifstream in(path);
    if (!in) throw Error("mesh", "cannot open '" + path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_mesh(buffer.str(), format);
}

}  // namespace membrane
