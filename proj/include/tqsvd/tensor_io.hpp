#pragma once

#include <iosfwd>
#include <string>

#include "tqsvd/tensor.hpp"

namespace tqsvd {

// Binary tensor container: 4-byte magic ("TNS1" real, "TNSC" complex), u32
// order, per-mode u32 dims, then the column-major payload as little-endian
// f64 (complex payloads interleave re, im).  Round-trips are bit exact.
void write_tns(std::ostream& os, const DenseTensor& a);
void write_tns(std::ostream& os, const ComplexTensor& a);
void write_tns_file(const std::string& path, const DenseTensor& a);
void write_tns_file(const std::string& path, const ComplexTensor& a);

DenseTensor read_tns(std::istream& is);
ComplexTensor read_tns_complex(std::istream& is);
DenseTensor read_tns_file(const std::string& path);
ComplexTensor read_tns_complex_file(const std::string& path);

// Line-oriented text import for order-3 tensors: one frontal slice per
// blank-line-separated block, each row a comma-separated list.  All blocks
// must agree on shape; dims are inferred.
DenseTensor read_tensor_text(std::istream& is);
DenseTensor read_tensor_text_file(const std::string& path);

}  // namespace tqsvd
