#ifndef TVFLOW_FIELD_IO_HPP
#define TVFLOW_FIELD_IO_HPP

#include <iosfwd>
#include <string>

#include "tvflow/field.hpp"

namespace tvflow {

// Raw field format: one text header line
//   tvflow-field v1 dim=<d> n=<n1[,n2]> L=<L1[,L2]>
// followed by little-endian 64-bit floats in row-major cell order.

void write_field(std::ostream& os, const ScalarField& u);
void write_field(const std::string& path, const ScalarField& u);
ScalarField read_field(std::istream& is);
ScalarField read_field(const std::string& path);

}  // namespace tvflow

#endif
