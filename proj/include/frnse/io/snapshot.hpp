#pragma once

// Binary field snapshots:
//
//   FRNSE-FIELD v1 n=<int> L=<decimal> t=<decimal>\n
//   n^3 x (real, imag) little-endian binary64, idx = (ix*n + iy)*n + iz
//
// Kernel tables use the same payload on the (2n)^3 padded grid, real part
// only, behind "FRNSE-KERNEL v1 n=<int> L=<decimal> variant=<name> a=<decimal> R=<decimal>\n".

#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <map>
#include <memory>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "frnse/error.hpp"
#include "frnse/grid.hpp"
#include "frnse/io/format.hpp"
#include "frnse/kernel.hpp"

namespace frnse::io {


namespace detail {

inline void put_f64(std::ostream& out, double v)
{
    std::uint64_t bits;
    std::memcpy(&bits, &v, 8);
    unsigned char b[8];
    for (int i = 0; i < 8; ++i)
        b[i] = static_cast<unsigned char>(bits >> (8 * i));
    out.write(reinterpret_cast<const char*>(b), 8);
}

inline double get_f64(std::istream& in)
{
    unsigned char b[8];
    if (!in.read(reinterpret_cast<char*>(b), 8))
        throw IoError("snapshot payload is truncated");
    std::uint64_t bits = 0;
    for (int i = 0; i < 8; ++i)
        bits |= std::uint64_t(b[i]) << (8 * i);
    double v;
    std::memcpy(&v, &bits, 8);
    return v;
}

// Splits "MAGIC v1 k=v k=v" into key/value pairs after checking the magic.
inline std::map<std::string, std::string> parse_header(const std::string& line,
                                                       const std::string& magic)
{
    std::istringstream ss(line);
    std::string word, version;
    ss >> word >> version;
    if (word != magic || version != "v1")
        throw IoError("not a " + magic + " v1 file");
    std::map<std::string, std::string> kv;
    while (ss >> word) {
        const auto eq = word.find('=');
        if (eq == std::string::npos)
            throw IoError("malformed header token '" + word + "'");
        kv[word.substr(0, eq)] = word.substr(eq + 1);
    }
    return kv;
}

inline double header_double(const std::map<std::string, std::string>& kv, const std::string& key)
{
    auto it = kv.find(key);
    if (it == kv.end())
        throw IoError("header is missing " + key);
    auto v = parse_double(it->second);
    if (!v)
        throw IoError("header value " + key + "=" + it->second + " is not a number");
    return *v;
}

inline int header_int(const std::map<std::string, std::string>& kv, const std::string& key)
{
    auto it = kv.find(key);
    if (it == kv.end())
        throw IoError("header is missing " + key);
    auto v = parse_int<int>(it->second);
    if (!v)
        throw IoError("header value " + key + "=" + it->second + " is not an integer");
    return *v;
}

inline std::string read_line(std::istream& in)
{
    std::string line;
    if (!std::getline(in, line))
        throw IoError("empty snapshot");
    return line;
}

} // namespace detail

struct Snapshot {
    Field field;
    double t = 0;
};

inline void write_field(std::ostream& out, const Field& f, double t)
{
    out << "FRNSE-FIELD v1 n=" << f.spec().n << " L=" << format_fixed(f.spec().L)
        << " t=" << format_fixed(t) << '\n';
    for (const auto& v : f.values()) {
        detail::put_f64(out, v.real());
        detail::put_f64(out, v.imag());
    }
    if (!out)
        throw IoError("failed to write field snapshot");
}

inline Snapshot read_field(std::istream& in)
{
    const auto kv = detail::parse_header(detail::read_line(in), "FRNSE-FIELD");
    GridSpec g{detail::header_int(kv, "n"), detail::header_double(kv, "L")};
    g.validate();
    const double t = detail::header_double(kv, "t");
    std::vector<cplx> values(g.size());
    for (auto& v : values) {
        const double re = detail::get_f64(in);
        const double im = detail::get_f64(in);
        v = {re, im};
    }
    return {Field(g, std::move(values)), t};
}

inline void write_field(const std::string& path, const Field& f, double t)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw IoError("cannot open " + path + " for writing");
    write_field(out, f, t);
}

inline Snapshot read_field(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot open " + path);
    return read_field(in);
}

inline void write_kernel_table(std::ostream& out, const KernelOperator& op)
{
    const auto& s = op.spec();
    out << "FRNSE-KERNEL v1 n=" << op.grid().n << " L=" << format_fixed(op.grid().L)
        << " variant=" << to_string(s.variant) << " a=" << format_fixed(s.a)
        << " R=" << format_fixed(s.R) << '\n';
    for (double v : op.padded_table()) {
        detail::put_f64(out, v);
        detail::put_f64(out, 0.0);
    }
    if (!out)
        throw IoError("failed to write kernel table");
}

inline std::shared_ptr<KernelOperator> read_kernel_table(std::istream& in)
{
    const auto kv = detail::parse_header(detail::read_line(in), "FRNSE-KERNEL");
    GridSpec g{detail::header_int(kv, "n"), detail::header_double(kv, "L")};
    g.validate();
    auto it = kv.find("variant");
    if (it == kv.end())
        throw IoError("header is missing variant");
    KernelSpec spec{parse_kernel_variant(it->second), detail::header_double(kv, "a"),
                    detail::header_double(kv, "R")};
    const std::size_t P = 2 * std::size_t(g.n);
    std::vector<double> table(P * P * P);
    for (auto& v : table) {
        v = detail::get_f64(in);
        detail::get_f64(in);
    }
    return std::make_shared<KernelOperator>(g, spec, std::move(table));
}

} // namespace frnse::io
