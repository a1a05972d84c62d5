#include "sbrnn/adam.hpp"

#include <cmath>

#include "sbrnn/error.hpp"

namespace sbrnn {

void Adam::step(std::span<const ArrayRef> params, std::span<const ArrayRef> grads) {
  require(params.size() == grads.size(), "Adam: parameter/gradient count mismatch");
  if (m_.empty()) {
    for (const auto& p : params) {
      m_.push_back(Matrix::Zero(p.rows, p.cols));
      v_.push_back(Matrix::Zero(p.rows, p.cols));
    }
  }
  require(m_.size() == params.size(), "Adam: parameter set changed between steps");
  ++t_;
  const double c1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
  for (std::size_t i = 0; i < params.size(); ++i) {
    auto theta = params[i].map();
    const auto g = grads[i].map();
    require(g.rows() == theta.rows() && g.cols() == theta.cols() && m_[i].rows() == theta.rows() &&
                m_[i].cols() == theta.cols(),
            "Adam: shape mismatch for " + params[i].name);
    m_[i] = cfg_.beta1 * m_[i] + (1.0 - cfg_.beta1) * g;
    v_[i] = cfg_.beta2 * v_[i] + (1.0 - cfg_.beta2) * g.cwiseAbs2();
    theta.array() -= cfg_.learning_rate * (m_[i].array() / c1) / ((v_[i].array() / c2).sqrt() + cfg_.epsilon);
  }
}

}  // namespace sbrnn
