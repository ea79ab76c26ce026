#include "spinforge/core/serialize.hpp"

#include <stdexcept>
#include <vector>

#include "spinforge/core/overloaded.hpp"

namespace spinforge {

using nlohmann::json;

namespace {

json basis_fields(const BasisDescriptor& basis) {
  json j;
  j["basis"] = basis_name(basis);
  std::visit(overloaded{
                 [&](const DickeBasis& b) { j["twice_S"] = b.spin.twice(); },
                 [&](const ProductBasis& b) { j["twice_S"] = {b.first.twice(), b.second.twice()}; },
                 [&](const CoupledBasis& b) {
                   j["twice_S"] = {b.twice_j1(), b.twice_j2()};
                   j["n_trunc"] = b.n_blocks();
                 },
             },
             basis);
  return j;
}

BasisDescriptor basis_from_fields(const json& j) {
  const std::string name = j.at("basis").get<std::string>();
  if (name == "dicke") return DickeBasis{SpinLength::from_twice(j.at("twice_S").get<int>())};
  const auto& ts = j.at("twice_S");
  if (!ts.is_array() || ts.size() != 2) throw std::invalid_argument("snapshot: twice_S must be [2*j1, 2*j2]");
  if (name == "two_ensemble") {
    return ProductBasis{SpinLength::from_twice(ts[0].get<int>()), SpinLength::from_twice(ts[1].get<int>())};
  }
  if (name == "truncated") return CoupledBasis(ts[0].get<int>(), ts[1].get<int>(), j.at("n_trunc").get<int>());
  throw std::invalid_argument("snapshot: unknown basis '" + name + "'");
}

template <class Derived>
void write_parts(json& j, const Eigen::MatrixBase<Derived>& values) {
  std::vector<double> re, im;
  re.reserve(static_cast<std::size_t>(values.size()));
  im.reserve(static_cast<std::size_t>(values.size()));
  for (Eigen::Index r = 0; r < values.rows(); ++r) {
    for (Eigen::Index c = 0; c < values.cols(); ++c) {
      re.push_back(values(r, c).real());
      im.push_back(values(r, c).imag());
    }
  }
  j["re"] = std::move(re);
  j["im"] = std::move(im);
}

std::vector<cplx> read_parts(const json& j, std::size_t expected) {
  const auto re = j.at("re").get<std::vector<double>>();
  const auto im = j.at("im").get<std::vector<double>>();
  if (re.size() != expected || im.size() != expected) throw std::invalid_argument("snapshot: amplitude count mismatch");
  std::vector<cplx> out(expected);
  for (std::size_t i = 0; i < expected; ++i) out[i] = {re[i], im[i]};
  return out;
}

}  // namespace

json to_json(const Ket& ket) {
  json j = basis_fields(basis_of(ket));
  write_parts(j, flat_amplitudes(ket));
  return j;
}

Ket ket_from_json(const json& j) {
  const BasisDescriptor basis = basis_from_fields(j);
  const int d = basis_dim(basis);
  const auto vals = read_parts(j, static_cast<std::size_t>(d));
  CVector a(d);
  for (int i = 0; i < d; ++i) a(i) = vals[static_cast<std::size_t>(i)];
  return ket_from_flat(basis, a);
}

json to_json(const DensityOperator& rho) {
  json j = basis_fields(rho.basis());
  j["dim"] = rho.matrix().rows();
  write_parts(j, rho.matrix());
  return j;
}

DensityOperator density_from_json(const json& j) {
  const BasisDescriptor basis = basis_from_fields(j);
  const int d = basis_dim(basis);
  const auto vals = read_parts(j, static_cast<std::size_t>(d) * static_cast<std::size_t>(d));
  CMatrix m(d, d);
  for (int r = 0; r < d; ++r)
    for (int c = 0; c < d; ++c) m(r, c) = vals[static_cast<std::size_t>(r) * d + c];
  return DensityOperator(basis, std::move(m));
}

}  // namespace spinforge
