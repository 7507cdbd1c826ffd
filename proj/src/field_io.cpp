#include "atl/field_io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>

#include "atl/errors.hpp"

namespace atl {
namespace {

// %.17g reloads every double exactly; NaN is spelled out so that readers do
// not have to cope with platform variants like "-nan(ind)".
void append_double(std::string& out, double v) {
    if (std::isnan(v)) {
        out += "nan";
        return;
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out += buf;
}

struct ScopedFile {
    std::FILE* fp;
    explicit ScopedFile(const std::string& path, const char* mode) : fp(std::fopen(path.c_str(), mode)) {
        if (!fp) throw ConfigError("cannot open " + path);
    }
    ~ScopedFile() {
        if (fp) std::fclose(fp);
    }
    ScopedFile(const ScopedFile&) = delete;
    ScopedFile& operator=(const ScopedFile&) = delete;
};

void write_all(const std::string& path, const std::string& content) {
    ScopedFile f(path, "wb");
    if (std::fwrite(content.data(), 1, content.size(), f.fp) != content.size())
        throw ConfigError("short write to " + path);
}

std::vector<std::string> split_commas(const std::string& line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string::npos) {
            out.push_back(line.substr(start));
            return out;
        }
        out.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
}

double parse_double(const std::string& s, const std::string& path) {
    const char* c = s.c_str();
    char* end = nullptr;
    const double v = std::strtod(c, &end);
    if (end == c || *end != '\0') throw ConfigError("bad number '" + s + "' in " + path);
    return v;
}

long parse_index(const std::string& s, const std::string& path) {
    const char* c = s.c_str();
    char* end = nullptr;
    const long v = std::strtol(c, &end, 10);
    if (end == c || *end != '\0' || v < 0) throw ConfigError("bad index '" + s + "' in " + path);
    return v;
}

}  // namespace

void write_field_csv(const ScalarField& f, const std::string& path) {
    const GridSpec& g = f.grid;
    std::string out;
    out.reserve(g.size() * 48 + 32);
    out += g.dim == 2 ? "i,j,x,y,value\n" : "i,j,k,x,y,z,value\n";
    for (std::size_t p = 0; p < g.size(); ++p) {
        const Idx id = g.unflatten(p);
        const Vec x = g.coord(id);
        for (int a = 0; a < g.dim; ++a) {
            out += std::to_string(id[a]);
            out += ',';
        }
        for (int a = 0; a < g.dim; ++a) {
            append_double(out, x[a]);
            out += ',';
        }
        append_double(out, f.values[p]);
        out += '\n';
    }
    write_all(path, out);
}

ScalarField read_field_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open " + path);
    std::string line;
    if (!std::getline(in, line)) throw ConfigError("empty field file " + path);
    int dim = 0;
    if (line == "i,j,x,y,value")
        dim = 2;
    else if (line == "i,j,k,x,y,z,value")
        dim = 3;
    else
        throw ConfigError("unrecognized field header in " + path);

    struct Row {
        Idx id;
        Vec x;
        double value;
    };
    std::vector<Row> rows;
    Idx max_index{0, 0, 0};
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto cols = split_commas(line);
        if (static_cast<int>(cols.size()) != 2 * dim + 1)
            throw ConfigError("wrong column count in " + path);
        Row r{{0, 0, 0}, {0.0, 0.0, 0.0}, 0.0};
        for (int a = 0; a < dim; ++a) {
            r.id[a] = static_cast<int>(parse_index(cols[a], path));
            max_index[a] = std::max(max_index[a], r.id[a]);
        }
        for (int a = 0; a < dim; ++a) r.x[a] = parse_double(cols[dim + a], path);
        r.value = parse_double(cols[2 * dim], path);
        rows.push_back(r);
    }

    GridSpec g;
    g.dim = dim;
    for (int a = 0; a < dim; ++a) g.counts[a] = max_index[a] + 1;
    for (int a = dim; a < 3; ++a) g.counts[a] = 1;
    // Origin comes from any index-zero row; spacing from the longest axis
    // baseline, which keeps the relative rounding at one ulp.
    int base_axis = 0;
    for (int a = 1; a < dim; ++a)
        if (g.counts[a] > g.counts[base_axis]) base_axis = a;
    bool have_origin[3] = {false, false, false};
    double far_coord = 0.0;
    bool have_far = false;
    for (const Row& r : rows) {
        for (int a = 0; a < dim; ++a)
            if (r.id[a] == 0 && !have_origin[a]) {
                g.origin[a] = r.x[a];
                have_origin[a] = true;
            }
        if (r.id[base_axis] == max_index[base_axis] && !have_far) {
            far_coord = r.x[base_axis];
            have_far = true;
        }
    }
    for (int a = 0; a < dim; ++a)
        if (!have_origin[a]) throw ConfigError("no index-zero row for axis in " + path);
    if (max_index[base_axis] < 1) throw ConfigError("degenerate grid in " + path);
    g.spacing = (far_coord - g.origin[base_axis]) / max_index[base_axis];
    g.validate();

    if (rows.size() != g.size()) throw ConfigError("node count mismatch in " + path);
    ScalarField f(g, "field", std::numeric_limits<double>::quiet_NaN());
    std::vector<char> seen(g.size(), 0);
    for (const Row& r : rows) {
        for (int a = 0; a < dim; ++a)
            if (r.id[a] >= g.counts[a]) throw ConfigError("index out of range in " + path);
        const std::size_t p = g.index(r.id);
        if (seen[p]) throw ConfigError("duplicate node in " + path);
        seen[p] = 1;
        f.values[p] = r.value;
    }
    return f;
}

void write_field_vtk(const ScalarField& f, const std::string& path) {
    const GridSpec& g = f.grid;
    std::string out;
    out.reserve(g.size() * 20 + 256);
    out += "# vtk DataFile Version 3.0\n";
    out += f.label.empty() ? std::string("field") : f.label;
    out += "\nASCII\nDATASET STRUCTURED_POINTS\n";
    std::ostringstream head;
    head << "DIMENSIONS " << g.counts[0] << ' ' << g.counts[1] << ' ' << g.counts[2] << '\n';
    out += head.str();
    out += "ORIGIN ";
    for (int a = 0; a < 3; ++a) {
        append_double(out, a < g.dim ? g.origin[a] : 0.0);
        out += a == 2 ? '\n' : ' ';
    }
    out += "SPACING ";
    for (int a = 0; a < 3; ++a) {
        append_double(out, g.spacing);
        out += a == 2 ? '\n' : ' ';
    }
    out += "POINT_DATA " + std::to_string(g.size()) + '\n';
    out += "SCALARS value double\nLOOKUP_TABLE default\n";
    // Legacy VTK wants x fastest; storage is x slowest.
    for (int k = 0; k < g.counts[2]; ++k)
        for (int j = 0; j < g.counts[1]; ++j)
            for (int i = 0; i < g.counts[0]; ++i) {
                append_double(out, f.values[g.index(Idx{i, j, k})]);
                out += '\n';
            }
    write_all(path, out);
}

void write_critical_points_csv(const std::vector<CriticalPointRecord>& pts, int dim,
                               const std::string& path) {
    if (dim != 2 && dim != 3) throw ConfigError("critical point table needs dim 2 or 3");
    std::string out;
    if (dim == 2)
        out += "i,j,x,y,lambda_1,lambda_2,class_k,spectrum_residual,equation_residual\n";
    else
        out += "i,j,k,x,y,z,lambda_1,lambda_2,lambda_3,class_k,spectrum_residual,"
               "equation_residual\n";
    for (const CriticalPointRecord& r : pts) {
        for (int a = 0; a < dim; ++a) {
            out += std::to_string(r.index[a]);
            out += ',';
        }
        for (int a = 0; a < dim; ++a) {
            append_double(out, r.location[a]);
            out += ',';
        }
        for (int a = 0; a < dim; ++a) {
            append_double(out, r.eigen.values[a]);
            out += ',';
        }
        out += std::to_string(r.classified_k);
        out += ',';
        append_double(out, r.spectrum_residual);
        out += ',';
        append_double(out, r.equation_residual_b);
        out += '\n';
    }
    write_all(path, out);
}

}  // namespace atl
