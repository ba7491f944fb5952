#include "pgnudge/snapshot_io.hpp"

#include <charconv>
#include <cstring>
#include <fstream>

#include <json.hpp>

namespace pgnudge {

std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

void write_snapshot(const std::filesystem::path& base, const Field3D& f,
                    const std::string& name, double time) {
    const auto& d = f.domain();
    {
        std::ofstream raw(base.string() + ".f64", std::ios::binary);
        if (!raw) throw std::runtime_error("cannot open " + base.string() + ".f64 for writing");
        static_assert(sizeof(double) == 8);
        raw.write(reinterpret_cast<const char*>(f.data().data()),
                  static_cast<std::streamsize>(f.size() * sizeof(double)));
    }
    nlohmann::ordered_json hdr;
    hdr["nx"] = d.nx;
    hdr["ny"] = d.ny;
    hdr["nz"] = d.nz;
    hdr["lx"] = d.lx;
    hdr["ly"] = d.ly;
    hdr["h"] = d.h_depth;
    hdr["name"] = name;
    hdr["time"] = time;
    std::ofstream side(base.string() + ".json");
    side << hdr.dump(2) << "\n";
}

Field3D read_snapshot(const std::filesystem::path& base, std::string* name_out,
                      double* time_out) {
    std::ifstream side(base.string() + ".json");
    if (!side) throw std::runtime_error("missing sidecar " + base.string() + ".json");
    nlohmann::json hdr = nlohmann::json::parse(side);
    DomainSpec d;
    d.nx = hdr.at("nx").get<int>();
    d.ny = hdr.at("ny").get<int>();
    d.nz = hdr.at("nz").get<int>();
    d.lx = hdr.at("lx").get<double>();
    d.ly = hdr.at("ly").get<double>();
    d.h_depth = hdr.at("h").get<double>();
    if (name_out) *name_out = hdr.at("name").get<std::string>();
    if (time_out) *time_out = hdr.at("time").get<double>();

    Field3D f(d);
    std::ifstream raw(base.string() + ".f64", std::ios::binary);
    if (!raw) throw std::runtime_error("missing raw file " + base.string() + ".f64");
    raw.read(reinterpret_cast<char*>(f.data().data()),
             static_cast<std::streamsize>(f.size() * sizeof(double)));
    if (static_cast<std::size_t>(raw.gcount()) != f.size() * sizeof(double))
        throw std::runtime_error("snapshot " + base.string() + " truncated");
    return f;
}

}  // namespace pgnudge
