#include "ipbm/geometry.hpp"

#include <bit>
#include <cctype>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <iterator>
#include <sstream>
#include <unordered_map>

namespace ipbm {

namespace {

static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big);

template <typename T>
T from_little_endian(const unsigned char* bytes)
{
    T value;
    std::memcpy(&value, bytes, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) {
        unsigned char tmp[sizeof(T)];
        std::memcpy(tmp, &value, sizeof(T));
        std::reverse(tmp, tmp + sizeof(T));
        std::memcpy(&value, tmp, sizeof(T));
    }
    return value;
}

template <typename T>
void put_little_endian(std::ostream& out, T value)
{
    unsigned char tmp[sizeof(T)];
    std::memcpy(tmp, &value, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) std::reverse(tmp, tmp + sizeof(T));
    out.write(reinterpret_cast<const char*>(tmp), sizeof(T));
}

/// Merges vertices that agree within `tol` in every coordinate.
class VertexWelder {
public:
    explicit VertexWelder(double tol) : tol_(tol > 0 ? tol : 1e-12) {}

    int insert(const Point3& p, std::vector<Point3>& vertices)
    {
        const Key base = key_of(p);
        for (int dx = -1; dx <= 1; ++dx) {
            for (int dy = -1; dy <= 1; ++dy) {
                for (int dz = -1; dz <= 1; ++dz) {
                    const auto it = cells_.find(Key{base.i + dx, base.j + dy, base.k + dz});
                    if (it == cells_.end()) continue;
                    for (int v : it->second) {
                        if ((vertices[v] - p).cwiseAbs().maxCoeff() <= tol_) return v;
                    }
                }
            }
        }
        const int index = static_cast<int>(vertices.size());
        vertices.push_back(p);
        cells_[base].push_back(index);
        return index;
    }

private:
    struct Key {
        std::int64_t i, j, k;
        bool operator==(const Key&) const = default;
    };
    struct KeyHash {
        std::size_t operator()(const Key& key) const
        {
            std::size_t h = std::hash<std::int64_t>{}(key.i);
            h = h * 1000003u ^ std::hash<std::int64_t>{}(key.j);
            h = h * 1000003u ^ std::hash<std::int64_t>{}(key.k);
            return h;
        }
    };

    Key key_of(const Point3& p) const
    {
        auto cell = [this](double x) {
            const double q = std::floor(x / tol_);
            if (!(std::abs(q) < 4e18)) throw StlParseError("STL: coordinate too large for vertex welding");
            return static_cast<std::int64_t>(q);
        };
        return Key{cell(p.x()), cell(p.y()), cell(p.z())};
    }

    double tol_;
    std::unordered_map<Key, std::vector<int>, KeyHash> cells_;
};

TriangleMesh parse_binary(const std::string& data, double tol)
{
    if (data.size() < 84) {
        throw StlParseError("STL: truncated binary header (" + std::to_string(data.size()) + " bytes, need 84)");
    }
    const auto* bytes = reinterpret_cast<const unsigned char*>(data.data());
    const std::uint32_t count = from_little_endian<std::uint32_t>(bytes + 80);
    const std::size_t expected = 84 + 50 * static_cast<std::size_t>(count);
    if (data.size() < expected) {
        const std::size_t facet = (data.size() - 84) / 50;
        throw StlParseError("STL: truncated binary body at byte " + std::to_string(84 + 50 * facet) +
                            " (facet " + std::to_string(facet) + " of " + std::to_string(count) + ")");
    }
    if (data.size() > expected) {
        throw StlParseError("STL: facet count mismatch: header declares " + std::to_string(count) +
                            " facets but body holds " + std::to_string((data.size() - 84) / 50) +
                            " (extra bytes at offset " + std::to_string(expected) + ")");
    }

    TriangleMesh mesh;
    mesh.triangles.reserve(count);
    VertexWelder welder(tol);
    for (std::uint32_t f = 0; f < count; ++f) {
        const unsigned char* facet = bytes + 84 + 50 * static_cast<std::size_t>(f);
        std::array<int, 3> tri{};
        for (int v = 0; v < 3; ++v) {
            Point3 p;
            for (int a = 0; a < 3; ++a) {
                p[a] = from_little_endian<float>(facet + 12 + 12 * v + 4 * a);
            }
            if (!p.allFinite()) {
                throw StlParseError("STL: non-finite vertex coordinate at byte " +
                                    std::to_string(84 + 50 * static_cast<std::size_t>(f) + 12 + 12 * v));
            }
            tri[v] = welder.insert(p, mesh.vertices);
        }
        mesh.triangles.push_back(tri);
    }
    return mesh;
}

class AsciiTokens {
public:
    explicit AsciiTokens(const std::string& text) : text_(text) {}

    bool next(std::string& token)
    {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) {
            if (text_[pos_] == '\n') ++line_;
            ++pos_;
        }
        if (pos_ >= text_.size()) return false;
        token_line_ = line_;
        const std::size_t start = pos_;
        while (pos_ < text_.size() && !std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
        token.assign(text_, start, pos_ - start);
        return true;
    }

    void skip_line()
    {
        while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
    }

    std::size_t line() const { return token_line_; }

private:
    const std::string& text_;
    std::size_t pos_ = 0;
    std::size_t line_ = 1;
    std::size_t token_line_ = 1;
};

[[noreturn]] void ascii_error(const AsciiTokens& tokens, const std::string& what)
{
    throw StlParseError("STL: " + what + " at line " + std::to_string(tokens.line()));
}

void expect(AsciiTokens& tokens, const char* word)
{
    std::string tok;
    if (!tokens.next(tok)) ascii_error(tokens, std::string("unexpected end of file, expected '") + word + "'");
    if (tok != word) ascii_error(tokens, "unreadable token '" + tok + "', expected '" + word + "'");
}

double read_number(AsciiTokens& tokens)
{
    std::string tok;
    if (!tokens.next(tok)) ascii_error(tokens, "unexpected end of file, expected a number");
    char* end = nullptr;
    const double value = std::strtod(tok.c_str(), &end);
    if (end == tok.c_str() || *end != '\0' || !std::isfinite(value)) {
        ascii_error(tokens, "unreadable number '" + tok + "'");
    }
    return value;
}

TriangleMesh parse_ascii(const std::string& text, double tol)
{
    AsciiTokens tokens(text);
    expect(tokens, "solid");
    tokens.skip_line();  // optional solid name

    TriangleMesh mesh;
    VertexWelder welder(tol);
    std::string tok;
    while (true) {
        if (!tokens.next(tok)) ascii_error(tokens, "unexpected end of file, expected 'facet' or 'endsolid'");
        if (tok == "endsolid") break;
        if (tok != "facet") ascii_error(tokens, "unreadable token '" + tok + "', expected 'facet'");
        expect(tokens, "normal");
        for (int a = 0; a < 3; ++a) read_number(tokens);  // normals are recomputed from winding
        expect(tokens, "outer");
        expect(tokens, "loop");
        std::array<int, 3> tri{};
        for (int v = 0; v < 3; ++v) {
            expect(tokens, "vertex");
            Point3 p;
            for (int a = 0; a < 3; ++a) p[a] = read_number(tokens);
            tri[v] = welder.insert(p, mesh.vertices);
        }
        expect(tokens, "endloop");
        expect(tokens, "endfacet");
        mesh.triangles.push_back(tri);
    }
    return mesh;
}

bool looks_ascii(const std::string& data)
{
    std::size_t i = 0;
    while (i < data.size() && std::isspace(static_cast<unsigned char>(data[i]))) ++i;
    return data.compare(i, 5, "solid") == 0;
}

Point3 facet_normal(const TriangleMesh& mesh, const std::array<int, 3>& tri)
{
    const Point3& a = mesh.vertices[tri[0]];
    const Point3 n = (mesh.vertices[tri[1]] - a).cross(mesh.vertices[tri[2]] - a);
    const double len = n.norm();
    return len > 0 ? Point3(n / len) : Point3::Zero();
}

}  // namespace

TriangleMesh read_stl(std::istream& in, double dedup_tol)
{
    const std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

    // A binary file whose header happens to start with "solid" is recognized by its exact size.
    if (data.size() >= 84) {
        const auto count = from_little_endian<std::uint32_t>(reinterpret_cast<const unsigned char*>(data.data()) + 80);
        if (data.size() == 84 + 50 * static_cast<std::size_t>(count)) return parse_binary(data, dedup_tol);
    }
    if (looks_ascii(data)) return parse_ascii(data, dedup_tol);
    return parse_binary(data, dedup_tol);
}

TriangleMesh load_stl(const std::filesystem::path& path, double dedup_tol)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("STL: cannot open " + path.string());
    return read_stl(in, dedup_tol);
}

void write_stl_binary(const std::filesystem::path& path, const TriangleMesh& mesh)
{
    mesh.validate();
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("STL: cannot write " + path.string());
    char header[80] = {};
    std::strncpy(header, "binary STL written by ipbm", sizeof(header) - 1);
    out.write(header, sizeof(header));
    put_little_endian<std::uint32_t>(out, static_cast<std::uint32_t>(mesh.triangles.size()));
    for (const auto& tri : mesh.triangles) {
        const Point3 n = facet_normal(mesh, tri);
        for (int a = 0; a < 3; ++a) put_little_endian<float>(out, static_cast<float>(n[a]));
        for (int v : tri) {
            for (int a = 0; a < 3; ++a) put_little_endian<float>(out, static_cast<float>(mesh.vertices[v][a]));
        }
        put_little_endian<std::uint16_t>(out, 0);
    }
}

void write_stl_ascii(const std::filesystem::path& path, const TriangleMesh& mesh)
{
    mesh.validate();
    std::ofstream out(path);
    if (!out) throw Error("STL: cannot write " + path.string());
    out << std::setprecision(17);
    out << "solid ipbm\n";
    for (const auto& tri : mesh.triangles) {
        const Point3 n = facet_normal(mesh, tri);
        out << "  facet normal " << n.x() << ' ' << n.y() << ' ' << n.z() << "\n    outer loop\n";
        for (int v : tri) {
            const Point3& p = mesh.vertices[v];
            out << "      vertex " << p.x() << ' ' << p.y() << ' ' << p.z() << '\n';
        }
        out << "    endloop\n  endfacet\n";
    }
    out << "endsolid ipbm\n";
}

PointSet read_point_cloud(const std::filesystem::path& path, PointRole role)
{
    std::ifstream in(path);
    if (!in) throw Error("point cloud: cannot open " + path.string());
    PointSet cloud;
    cloud.role = role;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        std::istringstream fields(line);
        Point3 p;
        if (!(fields >> p.x() >> p.y() >> p.z())) {
            throw Error("point cloud: unreadable line " + std::to_string(line_no) + " in " + path.string());
        }
        cloud.points.push_back(p);
    }
    return cloud;
}

void write_point_cloud(const std::filesystem::path& path, const PointSet& cloud)
{
    std::ofstream out(path);
    if (!out) throw Error("point cloud: cannot write " + path.string());
    out << std::setprecision(17);
    for (const auto& p : cloud.points) out << p.x() << ' ' << p.y() << ' ' << p.z() << '\n';
}

}  // namespace ipbm
