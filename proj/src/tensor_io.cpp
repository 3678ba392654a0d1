#include "tqsvd/tensor_io.hpp"

#include <cstring>
#include <fstream>
#include <sstream>

namespace tqsvd {

namespace {

// This codebase targets little-endian hosts; the on-disk format is defined
// as little-endian, so plain memcpy of u32/f64 is the serialization.
void put_u32(std::ostream& os, std::uint32_t v) {
    char buf[4];
    std::memcpy(buf, &v, 4);
    os.write(buf, 4);
}

std::uint32_t get_u32(std::istream& is) {
    char buf[4];
    if (!is.read(buf, 4)) throw std::runtime_error("tns: truncated header");
    std::uint32_t v;
    std::memcpy(&v, buf, 4);
    return v;
}

void put_f64(std::ostream& os, double v) {
    char buf[8];
    std::memcpy(buf, &v, 8);
    os.write(buf, 8);
}

double get_f64(std::istream& is) {
    char buf[8];
    if (!is.read(buf, 8)) throw std::runtime_error("tns: truncated payload");
    double v;
    std::memcpy(&v, buf, 8);
    return v;
}

std::vector<std::size_t> read_header(std::istream& is, const char* magic) {
    char m[4];
    if (!is.read(m, 4) || std::memcmp(m, magic, 4) != 0)
        throw std::runtime_error(std::string("tns: bad magic, expected ") + magic);
    std::uint32_t order = get_u32(is);
    if (order == 0 || order > 16) throw std::runtime_error("tns: implausible order");
    std::vector<std::size_t> dims(order);
    for (auto& d : dims) {
        d = get_u32(is);
        if (d == 0) throw std::runtime_error("tns: zero dimension");
    }
    return dims;
}

}  // namespace

void write_tns(std::ostream& os, const DenseTensor& a) {
    os.write("TNS1", 4);
    put_u32(os, static_cast<std::uint32_t>(a.order()));
    for (std::size_t d : a.dims) put_u32(os, static_cast<std::uint32_t>(d));
    for (double v : a.data) put_f64(os, v);
}

void write_tns(std::ostream& os, const ComplexTensor& a) {
    os.write("TNSC", 4);
    put_u32(os, static_cast<std::uint32_t>(a.order()));
    for (std::size_t d : a.dims) put_u32(os, static_cast<std::uint32_t>(d));
    for (const cd& v : a.data) {
        put_f64(os, v.real());
        put_f64(os, v.imag());
    }
}

DenseTensor read_tns(std::istream& is) {
    DenseTensor a(read_header(is, "TNS1"));
    for (double& v : a.data) v = get_f64(is);
    return a;
}

ComplexTensor read_tns_complex(std::istream& is) {
    ComplexTensor a(read_header(is, "TNSC"));
    for (cd& v : a.data) {
        double re = get_f64(is);
        double im = get_f64(is);
        v = cd(re, im);
    }
    return a;
}

void write_tns_file(const std::string& path, const DenseTensor& a) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open for write: " + path);
    write_tns(os, a);
}

void write_tns_file(const std::string& path, const ComplexTensor& a) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open for write: " + path);
    write_tns(os, a);
}

DenseTensor read_tns_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open: " + path);
    return read_tns(is);
}

ComplexTensor read_tns_complex_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open: " + path);
    return read_tns_complex(is);
}

DenseTensor read_tensor_text(std::istream& is) {
    std::vector<std::vector<std::vector<double>>> blocks(1);
    std::string line;
    while (std::getline(is, line)) {
        std::string trimmed = line;
        trimmed.erase(0, trimmed.find_first_not_of(" \t\r"));
        if (trimmed.empty()) {
            if (!blocks.back().empty()) blocks.emplace_back();
            continue;
        }
        std::vector<double> row;
        std::stringstream ss(trimmed);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            try {
                row.push_back(std::stod(cell));
            } catch (const std::exception&) {
                throw std::runtime_error("text tensor: bad number '" + cell + "'");
            }
        }
        blocks.back().push_back(std::move(row));
    }
    if (!blocks.empty() && blocks.back().empty()) blocks.pop_back();
    if (blocks.empty()) throw std::runtime_error("text tensor: no data");
    const std::size_t n1 = blocks[0].size();
    const std::size_t n2 = blocks[0][0].size();
    for (const auto& blk : blocks) {
        if (blk.size() != n1) throw std::runtime_error("text tensor: ragged slice heights");
        for (const auto& row : blk)
            if (row.size() != n2) throw std::runtime_error("text tensor: ragged row widths");
    }
    DenseTensor a(n1, n2, blocks.size());
    for (std::size_t k = 0; k < blocks.size(); ++k)
        for (std::size_t i = 0; i < n1; ++i)
            for (std::size_t j = 0; j < n2; ++j) a.at(i, j, k) = blocks[k][i][j];
    return a;
}

DenseTensor read_tensor_text_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open: " + path);
    return read_tensor_text(is);
}

}  // namespace tqsvd
