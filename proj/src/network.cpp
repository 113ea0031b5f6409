#include "dnp/network.hpp"

#include <cmath>
#include <random>

namespace dnpgcn {

std::string_view to_string(NormMode mode) { return mode == NormMode::Batch ? "batch" : "none"; }

NormMode parse_norm_mode(std::string_view name) {
  if (name == "batch") return NormMode::Batch;
  if (name == "none") return NormMode::None;
  throw ConfigError("unknown norm mode '" + std::string(name) + "' (expected batch or none)");
}

void ModelConfig::validate() const {
  if (width < 1) throw ConfigError("width must be at least 1");
  if (depth < 0) throw ConfigError("depth must be non-negative");
  if (node_features < 1) throw ConfigError("node feature width must be at least 1");
  if (edge_features < 1) throw ConfigError("edge feature width must be at least 1");
  if (classes < 2) throw ConfigError("need at least 2 classes");
}

namespace {

Linear make_linear(int in, int out, std::mt19937_64* rng) {
  Linear l{Matrix::Zero(in, out), Matrix::Zero(1, out)};
  if (rng) {
    const double bound = std::sqrt(6.0 / in);
    std::uniform_real_distribution<double> u(-bound, bound);
    for (int c = 0; c < out; ++c)
      for (int r = 0; r < in; ++r) l.W(r, c) = u(*rng);
  }
  return l;
}

BatchNorm make_bn(int f, bool zero) {
  const double one = zero ? 0.0 : 1.0;
  return {Matrix::Constant(1, f, one), Matrix::Zero(1, f), Matrix::Zero(1, f), Matrix::Constant(1, f, one)};
}

Mlp make_mlp(int f, std::mt19937_64* rng) {
  return {make_linear(f, f, rng), make_linear(f, f, rng), make_bn(f, !rng), make_bn(f, !rng)};
}

ModelParams make_params(const ModelConfig& cfg, std::mt19937_64* rng) {
  cfg.validate();
  const int f = cfg.width;
  ModelParams p;
  p.node_in = make_linear(cfg.node_features, f, rng);
  p.edge_in = make_linear(cfg.edge_features, f, rng);
  for (int l = 0; l < cfg.depth; ++l) {
    p.node_mlp.push_back(make_mlp(f, rng));
    if (cfg.edge_update) p.edge_mlp.push_back(make_mlp(f, rng));
  }
  p.cls1 = make_linear(cfg.readout_width(), f, rng);
  p.cls2 = make_linear(f, cfg.classes, rng);
  return p;
}

template <typename P, typename M>
std::vector<std::pair<std::string, M*>> collect(P& p, const ModelConfig& cfg, bool buffers) {
  std::vector<std::pair<std::string, M*>> out;
  auto linear = [&](const std::string& name, auto& l) {
    out.emplace_back(name + ".W", &l.W);
    out.emplace_back(name + ".b", &l.b);
  };
  auto bn = [&](const std::string& name, auto& b) {
    if (cfg.norm != NormMode::Batch) return;
    if (buffers) {
      out.emplace_back(name + ".running_mean", &b.running_mean);
      out.emplace_back(name + ".running_var", &b.running_var);
    } else {
      out.emplace_back(name + ".gamma", &b.gamma);
      out.emplace_back(name + ".beta", &b.beta);
    }
  };
  auto mlp = [&](const std::string& name, auto& m) {
    if (!buffers) linear(name + ".fc1", m.fc1);
    bn(name + ".bn1", m.bn1);
    if (!buffers) linear(name + ".fc2", m.fc2);
    bn(name + ".bn2", m.bn2);
  };
  if (!buffers) {
    linear("node_in", p.node_in);
    linear("edge_in", p.edge_in);
  }
  for (std::size_t l = 0; l < p.node_mlp.size(); ++l) {
    const std::string prefix = "layer" + std::to_string(l + 1);
    mlp(prefix + ".node", p.node_mlp[l]);
    if (l < p.edge_mlp.size()) mlp(prefix + ".edge", p.edge_mlp[l]);
  }
  if (!buffers) {
    linear("classifier.fc1", p.cls1);
    linear("classifier.fc2", p.cls2);
  }
  return out;
}

Matrix affine(const Matrix& x, const Linear& l) {
  Matrix y = x * l.W;
  y.rowwise() += l.b.row(0);
  return y;
}

Matrix relu(const Matrix& x) { return x.cwiseMax(0.0); }

Matrix relu_grad(const Matrix& dy, const Matrix& pre) {
  return (pre.array() > 0.0).select(dy, Matrix::Zero(dy.rows(), dy.cols()));
}

Matrix bn_forward(const Matrix& z, const BatchNorm& bn, Phase phase, BatchNormCache& c) {
  const Eigen::Index n = z.rows();
  if (phase == Phase::Train) {
    if (n == 0) {
      c.mean = Eigen::RowVectorXd::Zero(z.cols());
      c.var = Eigen::RowVectorXd::Zero(z.cols());
    } else {
      c.mean = z.colwise().mean();
      c.var = (z.rowwise() - c.mean).array().square().colwise().mean();
    }
  } else {
    c.mean = bn.running_mean.row(0);
    c.var = bn.running_var.row(0);
  }
  c.inv_std = (c.var.array() + kBatchNormEps).rsqrt();
  c.xhat = (z.rowwise() - c.mean).array().rowwise() * c.inv_std.array();
  Matrix y = c.xhat.array().rowwise() * bn.gamma.row(0).array();
  y.rowwise() += bn.beta.row(0);
  return y;
}

// Returns dz; accumulates dgamma, dbeta.
Matrix bn_backward(const Matrix& dy, const BatchNorm& bn, Phase phase, const BatchNormCache& c, BatchNorm& g) {
  g.gamma.row(0) += (dy.array() * c.xhat.array()).colwise().sum().matrix();
  g.beta.row(0) += dy.colwise().sum();
  const Matrix dxhat = dy.array().rowwise() * bn.gamma.row(0).array();
  if (phase == Phase::Eval) return dxhat.array().rowwise() * c.inv_std.array();
  const double n = static_cast<double>(dy.rows());
  if (n == 0) return dxhat;
  const Eigen::RowVectorXd sum_dxhat = dxhat.colwise().sum();
  const Eigen::RowVectorXd sum_dxhat_xhat = (dxhat.array() * c.xhat.array()).colwise().sum();
  Matrix dz = (n * dxhat).rowwise() - sum_dxhat;
  dz -= (c.xhat.array().rowwise() * sum_dxhat_xhat.array()).matrix();
  return (dz.array().rowwise() * (c.inv_std.array() / n)).matrix();
}

Matrix mlp_forward(const Matrix& x, const Mlp& m, NormMode norm, Phase phase, MlpCache& c) {
  c.x = x;
  c.y1 = affine(x, m.fc1);
  if (norm == NormMode::Batch) c.y1 = bn_forward(c.y1, m.bn1, phase, c.bn1);
  c.a1 = relu(c.y1);
  c.y2 = affine(c.a1, m.fc2);
  if (norm == NormMode::Batch) c.y2 = bn_forward(c.y2, m.bn2, phase, c.bn2);
  c.out = relu(c.y2);
  return c.out;
}

void linear_backward(const Matrix& x, const Matrix& dy, Linear& g) {
  g.W += x.transpose() * dy;
  g.b.row(0) += dy.colwise().sum();
}

Matrix mlp_backward(const Matrix& dout, const Mlp& m, NormMode norm, Phase phase, const MlpCache& c, Mlp& g) {
  Matrix dz2 = relu_grad(dout, c.y2);
  if (norm == NormMode::Batch) dz2 = bn_backward(dz2, m.bn2, phase, c.bn2, g.bn2);
  linear_backward(c.a1, dz2, g.fc2);
  Matrix dz1 = relu_grad(dz2 * m.fc2.W.transpose(), c.y1);
  if (norm == NormMode::Batch) dz1 = bn_backward(dz1, m.bn1, phase, c.bn1, g.bn1);
  linear_backward(c.x, dz1, g.fc1);
  return dz1 * m.fc1.W.transpose();
}

void fold_stats(BatchNorm& bn, const BatchNormCache& c) {
  const double m = kBatchNormMomentum;
  bn.running_mean.row(0) = m * bn.running_mean.row(0) + (1.0 - m) * c.mean;
  bn.running_var.row(0) = m * bn.running_var.row(0) + (1.0 - m) * c.var;
}

void check_input_widths(const GraphBatch& batch, const ModelConfig& cfg) {
  if (batch.node_x.rows() > 0 && batch.node_x.cols() != cfg.node_features)
    throw ConfigError("node feature width " + std::to_string(batch.node_x.cols()) + " does not match model width " +
                      std::to_string(cfg.node_features));
  if (batch.edge_x.rows() > 0 && batch.edge_x.cols() != cfg.edge_features)
    throw ConfigError("edge feature width " + std::to_string(batch.edge_x.cols()) + " does not match model width " +
                      std::to_string(cfg.edge_features));
}

}  // namespace

ModelParams init_params(const ModelConfig& cfg, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return make_params(cfg, &rng);
}

ModelParams zeros_like(const ModelConfig& cfg) { return make_params(cfg, nullptr); }

std::vector<std::pair<std::string, Matrix*>> parameter_refs(ModelParams& p, const ModelConfig& cfg) {
  return collect<ModelParams, Matrix>(p, cfg, false);
}

std::vector<std::pair<std::string, const Matrix*>> parameter_refs(const ModelParams& p, const ModelConfig& cfg) {
  return collect<const ModelParams, const Matrix>(p, cfg, false);
}

std::vector<std::pair<std::string, Matrix*>> buffer_refs(ModelParams& p, const ModelConfig& cfg) {
  return collect<ModelParams, Matrix>(p, cfg, true);
}

GraphBatch make_batch(std::span<const MolGraph* const> graphs) {
  GraphBatch b;
  std::size_t n = 0, m = 0;
  const std::size_t c = graphs.empty() ? 0 : graphs.front()->feature_width();
  for (const auto* g : graphs) {
    n += g->nodes.size();
    m += g->edges.size();
  }
  b.node_x.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(c));
  b.edge_x.resize(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(kEdgeFeatureWidth));
  int node_base = 0;
  Eigen::Index row = 0, erow = 0;
  for (const auto* g : graphs) {
    for (const auto& node : g->nodes) {
      if (node.features.size() != c)
        throw Error("graph '" + g->id + "' has node feature width " + std::to_string(node.features.size()) +
                    ", batch expects " + std::to_string(c));
      for (std::size_t k = 0; k < c; ++k) b.node_x(row, static_cast<Eigen::Index>(k)) = node.features[k];
      b.node_graph.push_back(b.graph_count);
      ++row;
    }
    for (const auto& e : g->edges) {
      if (e.i >= g->nodes.size() || e.j >= g->nodes.size())
        throw Error("graph '" + g->id + "' has an edge outside its node range");
      for (std::size_t k = 0; k < kEdgeFeatureWidth; ++k) b.edge_x(erow, static_cast<Eigen::Index>(k)) = e.encoded[k];
      b.src.push_back(node_base + static_cast<int>(e.i));
      b.dst.push_back(node_base + static_cast<int>(e.j));
      b.edge_graph.push_back(b.graph_count);
      ++erow;
    }
    node_base += static_cast<int>(g->nodes.size());
    ++b.graph_count;
  }
  return b;
}

GraphBatch make_batch(const MolGraph& g) {
  const MolGraph* one[] = {&g};
  return make_batch(one);
}

std::pair<Matrix, Matrix> project_inputs(const GraphBatch& batch, const ModelParams& p, const ModelConfig& cfg) {
  check_input_widths(batch, cfg);
  Matrix h = batch.node_x.rows() > 0 ? affine(batch.node_x, p.node_in) : Matrix(0, cfg.width);
  Matrix e = batch.edge_x.rows() > 0 ? affine(batch.edge_x, p.edge_in) : Matrix(0, cfg.width);
  return {std::move(h), std::move(e)};
}

std::pair<Matrix, Matrix> conv_layer(const Matrix& h, const Matrix& e, const GraphBatch& batch, const ModelParams& p,
                                     const ModelConfig& cfg, int layer, Phase phase, MlpCache* node_cache,
                                     MlpCache* edge_cache) {
  if (layer < 0 || layer >= cfg.depth) throw Error("layer index out of range");
  const auto l = static_cast<std::size_t>(layer);
  MlpCache scratch_n, scratch_e;

  Matrix agg = h;
  for (std::size_t k = 0; k < batch.src.size(); ++k) {
    const int i = batch.src[k], j = batch.dst[k];
    agg.row(i) += h.row(j);
    agg.row(j) += h.row(i);
    if (cfg.edge_in_node_update) {
      agg.row(i) += e.row(static_cast<Eigen::Index>(k));
      agg.row(j) += e.row(static_cast<Eigen::Index>(k));
    }
  }
  Matrix h_next = mlp_forward(agg, p.node_mlp[l], cfg.norm, phase, node_cache ? *node_cache : scratch_n);

  Matrix e_next;
  if (cfg.edge_update) {
    Matrix eagg = e;
    for (std::size_t k = 0; k < batch.src.size(); ++k)
      eagg.row(static_cast<Eigen::Index>(k)) += h.row(batch.src[k]) + h.row(batch.dst[k]);
    e_next = mlp_forward(eagg, p.edge_mlp[l], cfg.norm, phase, edge_cache ? *edge_cache : scratch_e);
  } else {
    e_next = e;
  }
  return {std::move(h_next), std::move(e_next)};
}

Matrix readout(const std::vector<Matrix>& h, const std::vector<Matrix>& e, const GraphBatch& batch,
               const ModelConfig& cfg) {
  const int f = cfg.width;
  Matrix hg = Matrix::Zero(batch.graph_count, static_cast<Eigen::Index>(h.size()) * f);
  for (std::size_t k = 0; k < h.size(); ++k) {
    auto block = hg.middleCols(static_cast<Eigen::Index>(k) * f, f);
    for (Eigen::Index i = 0; i < h[k].rows(); ++i) block.row(batch.node_graph[static_cast<std::size_t>(i)]) += h[k].row(i);
    if (cfg.edge_in_readout)
      for (Eigen::Index m = 0; m < e[k].rows(); ++m)
        block.row(batch.edge_graph[static_cast<std::size_t>(m)]) += e[k].row(m);
  }
  return hg;
}

Matrix classify(const Matrix& hg, const ModelParams& p) { return affine(relu(affine(hg, p.cls1)), p.cls2); }

ForwardTrace forward(const GraphBatch& batch, const ModelParams& p, const ModelConfig& cfg, Phase phase) {
  ForwardTrace t;
  t.phase = phase;
  auto [h0, e0] = project_inputs(batch, p, cfg);
  t.h.push_back(std::move(h0));
  t.e.push_back(std::move(e0));
  t.node.resize(static_cast<std::size_t>(cfg.depth));
  if (cfg.edge_update) t.edge.resize(static_cast<std::size_t>(cfg.depth));
  for (int l = 0; l < cfg.depth; ++l) {
    const auto ul = static_cast<std::size_t>(l);
    auto [h, e] = conv_layer(t.h.back(), t.e.back(), batch, p, cfg, l, phase, &t.node[ul],
                             cfg.edge_update ? &t.edge[ul] : nullptr);
    t.h.push_back(std::move(h));
    t.e.push_back(std::move(e));
  }
  t.readout = readout(t.h, t.e, batch, cfg);
  t.hidden_pre = affine(t.readout, p.cls1);
  t.hidden = relu(t.hidden_pre);
  t.logits = affine(t.hidden, p.cls2);
  return t;
}

double loss_weighted_ce(const Eigen::RowVectorXd& logits, int label, std::span<const double> class_weights) {
  if (label < 0 || label >= logits.size() || static_cast<std::size_t>(logits.size()) != class_weights.size())
    throw Error("label or class weights do not match the logits");
  const double mx = logits.maxCoeff();
  const double lse = mx + std::log((logits.array() - mx).exp().sum());
  return class_weights[static_cast<std::size_t>(label)] * (lse - logits(label));
}

BatchLoss batch_loss(const Matrix& logits, std::span<const int> labels, std::span<const double> class_weights) {
  if (static_cast<std::size_t>(logits.rows()) != labels.size()) throw Error("one label per graph required");
  BatchLoss out;
  out.dlogits = Matrix::Zero(logits.rows(), logits.cols());
  for (Eigen::Index g = 0; g < logits.rows(); ++g) {
    const Eigen::RowVectorXd z = logits.row(g);
    const int y = labels[static_cast<std::size_t>(g)];
    out.loss += loss_weighted_ce(z, y, class_weights);
    const double w = class_weights[static_cast<std::size_t>(y)];
    const double mx = z.maxCoeff();
    const Eigen::RowVectorXd ex = (z.array() - mx).exp();
    out.dlogits.row(g) = w * ex / ex.sum();
    out.dlogits(g, y) -= w;
  }
  return out;
}

ModelParams backward(const GraphBatch& batch, const ForwardTrace& t, const Matrix& dlogits, const ModelParams& p,
                     const ModelConfig& cfg) {
  ModelParams g = zeros_like(cfg);
  const int f = cfg.width;
  const int depth = cfg.depth;

  linear_backward(t.hidden, dlogits, g.cls2);
  const Matrix dpre = relu_grad(dlogits * p.cls2.W.transpose(), t.hidden_pre);
  linear_backward(t.readout, dpre, g.cls1);
  const Matrix dhg = dpre * p.cls1.W.transpose();

  std::vector<Matrix> dh(t.h.size()), de(t.e.size());
  for (std::size_t k = 0; k < t.h.size(); ++k) {
    dh[k] = Matrix::Zero(t.h[k].rows(), f);
    de[k] = Matrix::Zero(t.e[k].rows(), f);
    const auto block = dhg.middleCols(static_cast<Eigen::Index>(k) * f, f);
    for (Eigen::Index i = 0; i < dh[k].rows(); ++i) dh[k].row(i) = block.row(batch.node_graph[static_cast<std::size_t>(i)]);
    if (cfg.edge_in_readout)
      for (Eigen::Index m = 0; m < de[k].rows(); ++m)
        de[k].row(m) = block.row(batch.edge_graph[static_cast<std::size_t>(m)]);
  }

  for (int l = depth; l >= 1; --l) {
    const auto ul = static_cast<std::size_t>(l);
    const auto layer = ul - 1;
    const Matrix dagg = mlp_backward(dh[ul], p.node_mlp[layer], cfg.norm, t.phase, t.node[layer], g.node_mlp[layer]);
    dh[ul - 1] += dagg;
    for (std::size_t k = 0; k < batch.src.size(); ++k) {
      const int i = batch.src[k], j = batch.dst[k];
      dh[ul - 1].row(j) += dagg.row(i);
      dh[ul - 1].row(i) += dagg.row(j);
      if (cfg.edge_in_node_update) de[ul - 1].row(static_cast<Eigen::Index>(k)) += dagg.row(i) + dagg.row(j);
    }
    if (cfg.edge_update) {
      const Matrix deagg = mlp_backward(de[ul], p.edge_mlp[layer], cfg.norm, t.phase, t.edge[layer], g.edge_mlp[layer]);
      de[ul - 1] += deagg;
      for (std::size_t k = 0; k < batch.src.size(); ++k) {
        dh[ul - 1].row(batch.src[k]) += deagg.row(static_cast<Eigen::Index>(k));
        dh[ul - 1].row(batch.dst[k]) += deagg.row(static_cast<Eigen::Index>(k));
      }
    } else {
      de[ul - 1] += de[ul];
    }
  }

  if (batch.node_x.rows() > 0) linear_backward(batch.node_x, dh[0], g.node_in);
  if (batch.edge_x.rows() > 0) linear_backward(batch.edge_x, de[0], g.edge_in);
  return g;
}

void update_running_stats(ModelParams& p, const ForwardTrace& t, const ModelConfig& cfg) {
  if (cfg.norm != NormMode::Batch || t.phase != Phase::Train) return;
  for (std::size_t l = 0; l < p.node_mlp.size(); ++l) {
    fold_stats(p.node_mlp[l].bn1, t.node[l].bn1);
    fold_stats(p.node_mlp[l].bn2, t.node[l].bn2);
  }
  for (std::size_t l = 0; l < p.edge_mlp.size(); ++l) {
    // A batch without edges carries no statistics.
    if (t.edge[l].x.rows() == 0) continue;
    fold_stats(p.edge_mlp[l].bn1, t.edge[l].bn1);
    fold_stats(p.edge_mlp[l].bn2, t.edge[l].bn2);
  }
}

std::vector<std::uint8_t> activation_pattern(const ForwardTrace& t) {
  std::vector<std::uint8_t> out;
  auto add = [&](const Matrix& m) {
    for (Eigen::Index c = 0; c < m.cols(); ++c)
      for (Eigen::Index r = 0; r < m.rows(); ++r) out.push_back(m(r, c) > 0.0 ? 1 : 0);
  };
  for (const auto& c : t.node) {
    add(c.y1);
    add(c.y2);
  }
  for (const auto& c : t.edge) {
    add(c.y1);
    add(c.y2);
  }
  add(t.hidden_pre);
  return out;
}

}  // namespace dnpgcn
