// Copyright 2026 The avlab Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "avlab/model/layers.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace avlab::model {

Mat sinusoidal_positions(Eigen::Index length, int d_model) {
  Mat pe(length, d_model);
  for (Eigen::Index t = 0; t < length; ++t) {
    for (int i = 0; i < d_model; i += 2) {
      double angle = static_cast<double>(t) / std::pow(10000.0, static_cast<double>(i) / d_model);
      pe(t, i) = std::sin(angle);
      if (i + 1 < d_model) pe(t, i + 1) = std::cos(angle);
    }
  }
  return pe;
}

Mat softmax_rows(const Mat& logits) {
  Mat out(logits.rows(), logits.cols());
  for (Eigen::Index r = 0; r < logits.rows(); ++r) {
    double m = logits.row(r).maxCoeff();
    out.row(r) = (logits.row(r).array() - m).exp();
    out.row(r) /= out.row(r).sum();
  }
  return out;
}

constexpr double kLayerNormEps = 1e-5;

Mat layernorm_forward(const Mat& x, const Mat& gain, const Mat& bias, LayerNormCache* cache) {
  const Eigen::Index n = x.rows(), d = x.cols();
  Mat xhat(n, d);
  Eigen::VectorXd rstd(n);
  for (Eigen::Index r = 0; r < n; ++r) {
    double mean = x.row(r).mean();
    double var = (x.row(r).array() - mean).square().mean();
    rstd[r] = 1.0 / std::sqrt(var + kLayerNormEps);
    xhat.row(r) = (x.row(r).array() - mean) * rstd[r];
  }
  Mat y = (xhat.array().rowwise() * gain.row(0).array()).rowwise() + bias.row(0).array();
  if (cache) {
    cache->xhat = std::move(xhat);
    cache->rstd = std::move(rstd);
  }
  return y;
}

Mat layernorm_backward(const Mat& dy, const LayerNormCache& c, const Mat& gain, Mat& dgain,
                       Mat& dbias) {
  dgain.row(0) += (dy.array() * c.xhat.array()).colwise().sum().matrix();
  dbias.row(0) += dy.colwise().sum();
  Mat dxhat = dy.array().rowwise() * gain.row(0).array();
  Mat dx(dy.rows(), dy.cols());
  for (Eigen::Index r = 0; r < dy.rows(); ++r) {
    double m1 = dxhat.row(r).mean();
    double m2 = dxhat.row(r).dot(c.xhat.row(r)) / static_cast<double>(dy.cols());
    dx.row(r) = c.rstd[r] * (dxhat.row(r).array() - m1 - c.xhat.row(r).array() * m2);
  }
  return dx;
}

namespace {

Mat affine(const Mat& x, const Mat& w, const Mat& b) {
  Mat y(x.rows(), w.cols());
  y.noalias() = x * w;
  y.rowwise() += b.row(0);
  return y;
}

}  // namespace

KeyValue attention_project_kv(const ParamStore& p, const std::string& prefix, const Mat& xkv) {
  return {affine(xkv, p.at(prefix + ".wk"), p.at(prefix + ".bk")),
          affine(xkv, p.at(prefix + ".wv"), p.at(prefix + ".bv"))};
}

Mat attention_forward(const ParamStore& p, const std::string& prefix, const Mat& xq,
                      const Mat& xkv, const AttentionMask& mask, int n_heads,
                      AttentionCache* cache) {
  KeyValue kv = attention_project_kv(p, prefix, xkv);
  if (cache) cache->xkv = xkv;
  return attention_forward_kv(p, prefix, xq, kv, mask, n_heads, cache);
}

Mat attention_forward_kv(const ParamStore& p, const std::string& prefix, const Mat& xq,
                         const KeyValue& kv, const AttentionMask& mask, int n_heads,
                         AttentionCache* cache) {
  const Eigen::Index tq = xq.rows(), tk = kv.k.rows();
  const Eigen::Index d = xq.cols(), dh = d / n_heads;
  const double scale = 1.0 / std::sqrt(static_cast<double>(dh));
  Mat q = affine(xq, p.at(prefix + ".wq"), p.at(prefix + ".bq"));
  Mat context(tq, d);
  std::vector<Mat> probs;
  if (cache) probs.reserve(static_cast<size_t>(n_heads));
  const Eigen::Index key_limit = mask.key_valid < 0 ? tk : std::min(tk, mask.key_valid);
  Mat scores(tq, tk);
  for (int h = 0; h < n_heads; ++h) {
    scores.noalias() = q.middleCols(h * dh, dh) * kv.k.middleCols(h * dh, dh).transpose();
    scores *= scale;
    for (Eigen::Index i = 0; i < tq; ++i) {
      Eigen::Index limit = mask.causal ? std::min(key_limit, i + 1) : key_limit;
      auto row = scores.row(i);
      if (limit <= 0) {
        row.setZero();
        continue;
      }
      double m = row.head(limit).maxCoeff();
      row.head(limit) = (row.head(limit).array() - m).exp();
      row.head(limit) /= row.head(limit).sum();
      row.tail(tk - limit).setZero();
    }
    context.middleCols(h * dh, dh).noalias() = scores * kv.v.middleCols(h * dh, dh);
    if (cache) probs.push_back(scores);
  }
  Mat y = affine(context, p.at(prefix + ".wo"), p.at(prefix + ".bo"));
  if (cache) {
    cache->xq = xq;
    cache->q = std::move(q);
    cache->kv = kv;
    cache->probs = std::move(probs);
    cache->context = std::move(context);
  }
  return y;
}

void attention_backward(const ParamStore& p, const std::string& prefix, const AttentionCache& c,
                        const Mat& dy, int n_heads, GradStore& g, Mat& dxq, Mat& dxkv) {
  const Eigen::Index d = dy.cols(), dh = d / n_heads;
  const double scale = 1.0 / std::sqrt(static_cast<double>(dh));
  g.at(prefix + ".wo").noalias() += c.context.transpose() * dy;
  g.at(prefix + ".bo").row(0) += dy.colwise().sum();
  Mat dcontext = dy * p.at(prefix + ".wo").transpose();

  Mat dq(c.q.rows(), d), dk(c.kv.k.rows(), d), dv(c.kv.v.rows(), d);
  for (int h = 0; h < n_heads; ++h) {
    const Mat& prob = c.probs[static_cast<size_t>(h)];
    auto dctx_h = dcontext.middleCols(h * dh, dh);
    dv.middleCols(h * dh, dh).noalias() = prob.transpose() * dctx_h;
    Mat dprob = dctx_h * c.kv.v.middleCols(h * dh, dh).transpose();
    // softmax backward: dS = P * (dP - rowsum(dP * P))
    Eigen::VectorXd inner = (dprob.array() * prob.array()).rowwise().sum();
    Mat dscores = prob.array() * (dprob.array().colwise() - inner.array());
    dscores *= scale;
    dq.middleCols(h * dh, dh).noalias() = dscores * c.kv.k.middleCols(h * dh, dh);
    dk.middleCols(h * dh, dh).noalias() = dscores.transpose() * c.q.middleCols(h * dh, dh);
  }
  g.at(prefix + ".wq").noalias() += c.xq.transpose() * dq;
  g.at(prefix + ".bq").row(0) += dq.colwise().sum();
  g.at(prefix + ".wk").noalias() += c.xkv.transpose() * dk;
  g.at(prefix + ".bk").row(0) += dk.colwise().sum();
  g.at(prefix + ".wv").noalias() += c.xkv.transpose() * dv;
  g.at(prefix + ".bv").row(0) += dv.colwise().sum();
  dxq.noalias() = dq * p.at(prefix + ".wq").transpose();
  dxkv.noalias() = dk * p.at(prefix + ".wk").transpose();
  dxkv.noalias() += dv * p.at(prefix + ".wv").transpose();
}

double gelu(double x) { return 0.5 * x * (1.0 + std::erf(x / std::numbers::sqrt2)); }

double gelu_derivative(double x) {
  double cdf = 0.5 * (1.0 + std::erf(x / std::numbers::sqrt2));
  double pdf = std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
  return cdf + x * pdf;
}

Mat ffn_forward(const ParamStore& p, const std::string& prefix, const Mat& x, FfnCache* cache) {
  Mat pre = affine(x, p.at(prefix + ".w1"), p.at(prefix + ".b1"));
  Mat act = pre.unaryExpr([](double v) { return gelu(v); });
  Mat y = affine(act, p.at(prefix + ".w2"), p.at(prefix + ".b2"));
  if (cache) {
    cache->x = x;
    cache->pre = std::move(pre);
    cache->act = std::move(act);
  }
  return y;
}

Mat ffn_backward(const ParamStore& p, const std::string& prefix, const FfnCache& c, const Mat& dy,
                 GradStore& g) {
  g.at(prefix + ".w2").noalias() += c.act.transpose() * dy;
  g.at(prefix + ".b2").row(0) += dy.colwise().sum();
  Mat dact = dy * p.at(prefix + ".w2").transpose();
  Mat dpre = dact.array() * c.pre.unaryExpr([](double v) { return gelu_derivative(v); }).array();
  g.at(prefix + ".w1").noalias() += c.x.transpose() * dpre;
  g.at(prefix + ".b1").row(0) += dpre.colwise().sum();
  return dpre * p.at(prefix + ".w1").transpose();
}

}  // namespace avlab::model
