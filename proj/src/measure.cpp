#include "groupwalk/measure.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

namespace groupwalk {

SparseMeasure::SparseMeasure(ModelPtr model, AtomMap atoms, double dropped_mass)
    : model_(std::move(model)), atoms_(std::move(atoms)), dropped_(dropped_mass) {
  validate();
}

void SparseMeasure::validate() const {
  if (!model_) throw ValidationError("measure needs a group model");
  if (dropped_ < 0) throw ValidationError("dropped_mass must be non-negative");
  KahanSum s;
  for (const auto& [g, p] : atoms_) {
    if (g.tag != model_->tag())
      throw ModelMismatchError("measure atom does not belong to " + model_->name());
    if (!(p > 0)) throw ValidationError("measure atoms must have strictly positive mass");
    s.add(p);
  }
  double total = s.value() + dropped_;
  if (std::abs(total - 1.0) > kMassTolerance)
    throw ValidationError("measure mass " + std::to_string(total) + " violates normalization");
}

double SparseMeasure::total_mass() const {
  KahanSum s;
  for (const auto& [g, p] : atoms_) s.add(p);
  return s.value();
}

SparseMeasure SparseMeasure::point_mass(ModelPtr model, const GroupElement& g) {
  AtomMap m;
  m.emplace(g, 1.0);
  return SparseMeasure(std::move(model), std::move(m), 0.0);
}

SparseMeasure SparseMeasure::uniform(ModelPtr model, const std::vector<GroupElement>& support) {
  if (support.empty()) throw ValidationError("uniform measure needs non-empty support");
  AtomMap m;
  double p = 1.0 / static_cast<double>(support.size());
  for (const auto& g : support)
    if (!m.emplace(g, p).second) throw ValidationError("duplicate atom in uniform support");
  return SparseMeasure(std::move(model), std::move(m), 0.0);
}

SparseMeasure SparseMeasure::from_atoms(
    ModelPtr model, const std::vector<std::pair<GroupElement, double>>& atoms) {
  AtomMap m;
  for (const auto& [g, p] : atoms)
    if (!m.emplace(g, p).second) throw ValidationError("duplicate atom");
  return SparseMeasure(std::move(model), std::move(m), 0.0);
}

std::vector<std::pair<GroupElement, double>> SparseMeasure::sorted_atoms() const {
  std::vector<std::pair<GroupElement, double>> v(atoms_.begin(), atoms_.end());
  std::sort(v.begin(), v.end(),
            [](const auto& a, const auto& b) { return element_less(a.first, b.first); });
  return v;
}

SparseMeasure convolve(const SparseMeasure& mu, const SparseMeasure& nu, size_t budget_atoms) {
  if (mu.model()->tag() != nu.model()->tag())
    throw ModelMismatchError("convolve: operands live on different groups");
  const auto& model = *mu.model();
  SparseMeasure::AtomMap out;
  out.reserve(std::max(mu.support_size(), nu.support_size()));
  for (const auto& [h, ph] : mu.atoms()) {
    for (const auto& [k, pk] : nu.atoms()) {
      GroupElement g = model.mul(h, k);
      out[g] += ph * pk;
      if (out.size() > budget_atoms)
        throw BudgetError("convolution support exceeded budget of " +
                              std::to_string(budget_atoms) + " atoms",
                          0);
    }
  }
  // Total output mass is the product of the input masses, so the pruning
  // ledgers combine as 1-(1-d1)(1-d2).  Renormalize exactly against
  // accumulated rounding so invariant checks stay inside 1e-12 over long
  // streams.
  double kept = (1.0 - mu.dropped_mass()) * (1.0 - nu.dropped_mass());
  double dropped = 1.0 - kept;
  KahanSum s;
  for (const auto& [g, p] : out) s.add(p);
  double scale = kept / s.value();
  if (std::abs(scale - 1.0) > 1e-9)
    throw ValidationError("convolution lost mass beyond rounding");
  for (auto& [g, p] : out) p *= scale;
  return SparseMeasure(mu.model(), std::move(out), dropped);
}

SparseMeasure translate(const GroupElement& g, const SparseMeasure& mu) {
  const auto& model = *mu.model();
  SparseMeasure::AtomMap out;
  out.reserve(mu.support_size());
  for (const auto& [x, p] : mu.atoms()) out.emplace(model.mul(g, x), p);
  return SparseMeasure(mu.model(), std::move(out), mu.dropped_mass());
}

double tv_distance(const SparseMeasure& mu, const SparseMeasure& nu) {
  if (mu.model()->tag() != nu.model()->tag())
    throw ModelMismatchError("tv_distance: operands live on different groups");
  KahanSum s;
  for (const auto& [g, p] : mu.atoms()) s.add(std::abs(p - nu.mass_of(g)));
  for (const auto& [g, q] : nu.atoms())
    if (mu.mass_of(g) == 0.0) s.add(q);
  return s.value();
}

double entropy(const SparseMeasure& mu) {
  KahanSum s;
  for (const auto& [g, p] : mu.atoms()) s.add(-p * std::log(p));
  double h = s.value();
  return h < 0 ? 0.0 : h;
}

Moment first_moment(const SparseMeasure& mu) {
  Moment r;
  KahanSum s;
  for (const auto& [g, p] : mu.atoms()) {
    WordLength wl = mu.model()->word_length(g);
    r.approximate = r.approximate || wl.approximate;
    s.add(p * wl.value);
  }
  r.value = s.value();
  return r;
}

std::vector<double> barycenter(const SparseMeasure& mu) {
  std::vector<KahanSum> acc;
  for (const auto& [g, p] : mu.atoms()) {
    auto v = mu.model()->abelianize(g);
    if (acc.empty()) acc.resize(v.size());
    for (size_t i = 0; i < v.size(); ++i) acc[i].add(p * static_cast<double>(v[i]));
  }
  std::vector<double> out(acc.size());
  for (size_t i = 0; i < acc.size(); ++i) out[i] = acc[i].value();
  return out;
}

bool is_centered(const SparseMeasure& mu, double tol) {
  for (double x : barycenter(mu))
    if (std::abs(x) > tol) return false;
  return true;
}

SparseMeasure prune(const SparseMeasure& mu, double eps) {
  if (eps < 0 || eps > 0.01) throw ValidationError("prune eps must lie in [0, 0.01]");
  if (eps == 0.0) return mu;
  auto atoms = mu.sorted_atoms();
  std::stable_sort(atoms.begin(), atoms.end(),
                   [](const auto& a, const auto& b) { return a.second < b.second; });
  double removed = 0.0;
  size_t cut = 0;
  while (cut < atoms.size() && removed + atoms[cut].second <= eps) removed += atoms[cut++].second;
  if (cut == atoms.size()) throw ValidationError("prune would empty the support");
  double dropped = mu.dropped_mass() + removed;
  SparseMeasure::AtomMap out;
  KahanSum kept;
  for (size_t i = cut; i < atoms.size(); ++i) kept.add(atoms[i].second);
  double scale = (1.0 - dropped) / kept.value();
  for (size_t i = cut; i < atoms.size(); ++i) out.emplace(atoms[i].first, atoms[i].second * scale);
  return SparseMeasure(mu.model(), std::move(out), dropped);
}

void write_measure_csv(std::ostream& os, const SparseMeasure& mu) {
  os << "# model=" << mu.model()->name() << " dropped_mass=" << std::setprecision(17)
     << mu.dropped_mass() << "\n";
  os << "element,mass\n";
  for (const auto& [g, p] : mu.sorted_atoms())
    os << mu.model()->render(g) << "," << std::setprecision(17) << p << "\n";
}

SparseMeasure read_measure_csv(std::istream& is, ModelPtr model) {
  std::string line;
  double dropped = 0.0;
  SparseMeasure::AtomMap atoms;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      auto pos = line.find("dropped_mass=");
      if (pos != std::string::npos) dropped = std::stod(line.substr(pos + 13));
      continue;
    }
    if (line.rfind("element,", 0) == 0) continue;
    auto comma = line.rfind(',');
    if (comma == std::string::npos) throw ValidationError("bad measure CSV row: " + line);
    GroupElement g = model->parse(line.substr(0, comma));
    double p = std::stod(line.substr(comma + 1));
    if (!atoms.emplace(g, p).second) throw ValidationError("duplicate atom in measure CSV");
  }
  return SparseMeasure(std::move(model), std::move(atoms), dropped);
}

}  // namespace groupwalk
