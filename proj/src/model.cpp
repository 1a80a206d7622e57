#include "pathnat/model.hpp"

#include "json.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>

namespace pathnat {

namespace {

double sigmoid(double x) {
    if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

/// log(1 + e^x) without overflow.
double softplus(double x) {
    if (x > 0) return x + std::log1p(std::exp(-x));
    return std::log1p(std::exp(x));
}

const std::vector<std::size_t>& dims_of(const ModelShape& s, bool vertex) {
    return vertex ? s.layout.vertex_dims : s.layout.edge_dims;
}

struct ItemTrace {
    std::vector<Eigen::VectorXd> pre;  // W_j x_j + b_j
    Eigen::VectorXd code;
};

struct StepTrace {
    Eigen::VectorXd gates;  // activated [i f o g]
    Eigen::VectorXd c;
    Eigen::VectorXd tanh_c;
    Eigen::VectorXd h;
};

struct PathTrace {
    std::vector<ItemTrace> items;
    std::vector<StepTrace> steps;
    double score = 0.0;
};

void check_item(const PathItem& item, const ModelShape& shape) {
    const auto& dims = dims_of(shape, item.vertex);
    const auto width = std::accumulate(dims.begin(), dims.end(), std::size_t{0});
    if (item.values.size() != width) {
        throw Error("feature width " + std::to_string(item.values.size()) + " does not match model width " +
                    std::to_string(width));
    }
}

Eigen::VectorXd encode_item_traced(const PathItem& item, const ModelParameters& p, ItemTrace* trace) {
    check_item(item, p.shape());
    const auto& dims = dims_of(p.shape(), item.vertex);
    const auto lf = static_cast<Eigen::Index>(p.shape().feature_width);
    Eigen::VectorXd code = Eigen::VectorXd::Zero(lf);
    std::size_t offset = 0;
    if (trace) trace->pre.resize(dims.size());
    for (std::size_t j = 0; j < dims.size(); ++j) {
        const ConstVectorView x(item.values.data() + offset, static_cast<Eigen::Index>(dims[j]));
        offset += dims[j];
        Eigen::VectorXd z = item.vertex ? Eigen::VectorXd(p.vertex_weight(j) * x + p.vertex_bias(j))
                                        : Eigen::VectorXd(p.edge_weight(j) * x + p.edge_bias(j));
        code += z.cwiseMax(0.0);
        if (trace) trace->pre[j] = std::move(z);
    }
    code /= static_cast<double>(dims.size());
    if (trace) trace->code = code;
    return code;
}

Eigen::VectorXd run_lstm(const FeaturizedPath& path, const ModelParameters& p, PathTrace* trace) {
    if (path.items.empty()) throw Error("encode_path: empty sequence");
    const auto h = static_cast<Eigen::Index>(p.shape().code_length);
    const auto wx = p.lstm_input_weight();
    const auto wh = p.lstm_recurrent_weight();
    const auto b = p.lstm_bias();
    Eigen::VectorXd hs = Eigen::VectorXd::Zero(h);
    Eigen::VectorXd cs = Eigen::VectorXd::Zero(h);
    if (trace) {
        trace->items.resize(path.items.size());
        trace->steps.resize(path.items.size());
    }
    for (std::size_t t = 0; t < path.items.size(); ++t) {
        const auto x = encode_item_traced(path.items[t], p, trace ? &trace->items[t] : nullptr);
        Eigen::VectorXd a = wx * x + wh * hs + b;
        for (Eigen::Index k = 0; k < 3 * h; ++k) a(k) = sigmoid(a(k));
        for (Eigen::Index k = 3 * h; k < 4 * h; ++k) a(k) = std::tanh(a(k));
        cs = a.segment(h, h).cwiseProduct(cs) + a.segment(0, h).cwiseProduct(a.segment(3 * h, h));
        Eigen::VectorXd tc = cs.array().tanh();
        hs = a.segment(2 * h, h).cwiseProduct(tc);
        if (trace) {
            auto& st = trace->steps[t];
            st.gates = std::move(a);
            st.c = cs;
            st.tanh_c = std::move(tc);
            st.h = hs;
        }
    }
    return hs;
}

double forward(const FeaturizedPath& path, const ModelParameters& p, PathTrace* trace) {
    const auto code = run_lstm(path, p, trace);
    const double m = p.score_weight().dot(code) + p.score_bias();
    if (trace) trace->score = m;
    return m;
}

/// Accumulates d(loss)/d(params) into grad given d(loss)/d(score).
void backprop(const FeaturizedPath& path, const ModelParameters& p, const PathTrace& trace, double dm,
              ModelParameters& grad) {
    const auto h = static_cast<Eigen::Index>(p.shape().code_length);
    const auto T = trace.steps.size();

    grad.score_weight() += dm * trace.steps.back().h;
    grad.score_bias() += dm;

    const auto wx = p.lstm_input_weight();
    const auto wh = p.lstm_recurrent_weight();
    auto gwx = grad.lstm_input_weight();
    auto gwh = grad.lstm_recurrent_weight();
    auto gb = grad.lstm_bias();

    Eigen::VectorXd dh = dm * p.score_weight();
    Eigen::VectorXd dc = Eigen::VectorXd::Zero(h);
    const Eigen::VectorXd zero = Eigen::VectorXd::Zero(h);
    Eigen::VectorXd da(4 * h);

    for (std::size_t t = T; t-- > 0;) {
        const auto& st = trace.steps[t];
        const auto& c_prev = t > 0 ? trace.steps[t - 1].c : zero;
        const auto& h_prev = t > 0 ? trace.steps[t - 1].h : zero;
        const auto i = st.gates.segment(0, h);
        const auto f = st.gates.segment(h, h);
        const auto o = st.gates.segment(2 * h, h);
        const auto g = st.gates.segment(3 * h, h);

        dc += dh.cwiseProduct(o).cwiseProduct((1.0 - st.tanh_c.array().square()).matrix());
        const Eigen::VectorXd d_o = dh.cwiseProduct(st.tanh_c);
        da.segment(0, h) = dc.cwiseProduct(g).cwiseProduct(i.cwiseProduct((1.0 - i.array()).matrix()));
        da.segment(h, h) = dc.cwiseProduct(c_prev).cwiseProduct(f.cwiseProduct((1.0 - f.array()).matrix()));
        da.segment(2 * h, h) = d_o.cwiseProduct(o.cwiseProduct((1.0 - o.array()).matrix()));
        da.segment(3 * h, h) = dc.cwiseProduct(i).cwiseProduct((1.0 - g.array().square()).matrix());

        const auto& x = trace.items[t].code;
        gwx.noalias() += da * x.transpose();
        gwh.noalias() += da * h_prev.transpose();
        gb += da;

        const Eigen::VectorXd dx = wx.transpose() * da;
        dh = wh.transpose() * da;
        dc = dc.cwiseProduct(f);

        // Item encoder: code = mean_j ReLU(z_j).
        const auto& item = path.items[t];
        const auto& dims = dims_of(p.shape(), item.vertex);
        const double scale = 1.0 / static_cast<double>(dims.size());
        std::size_t offset = 0;
        for (std::size_t j = 0; j < dims.size(); ++j) {
            const ConstVectorView xj(item.values.data() + offset, static_cast<Eigen::Index>(dims[j]));
            offset += dims[j];
            const auto& z = trace.items[t].pre[j];
            const Eigen::VectorXd dz = (z.array() > 0.0).select(scale * dx.array(), 0.0).matrix();
            if (item.vertex) {
                grad.vertex_weight(j).noalias() += dz * xj.transpose();
                grad.vertex_bias(j) += dz;
            } else {
                grad.edge_weight(j).noalias() += dz * xj.transpose();
                grad.edge_bias(j) += dz;
            }
        }
    }
}

}  // namespace

// ---------------------------------------------------------------------------
// ModelParameters

ModelParameters::ModelParameters(const ModelShape& shape) : shape_(shape) {
    if (shape.layout.vertex_dims.size() != kVertexFeatureCount || shape.layout.edge_dims.size() != kEdgeFeatureCount) {
        throw Error("model shape: wrong number of feature groups");
    }
    if (shape.feature_width == 0 || shape.code_length == 0) throw Error("model shape: zero width");
    std::size_t offset = 0;
    auto add = [&](std::string name, std::size_t rows, std::size_t cols) {
        tensors_.push_back({std::move(name), rows, cols, offset});
        offset += rows * cols;
    };
    const auto lf = shape.feature_width;
    const auto h = shape.code_length;
    for (std::size_t j = 0; j < kVertexFeatureCount; ++j) {
        add("vertex_w" + std::to_string(j), lf, shape.layout.vertex_dims[j]);
        add("vertex_b" + std::to_string(j), lf, 1);
    }
    for (std::size_t j = 0; j < kEdgeFeatureCount; ++j) {
        add("edge_w" + std::to_string(j), lf, shape.layout.edge_dims[j]);
        add("edge_b" + std::to_string(j), lf, 1);
    }
    add("lstm_wx", 4 * h, lf);
    add("lstm_wh", 4 * h, h);
    add("lstm_b", 4 * h, 1);
    add("score_w", h, 1);
    add("score_b", 1, 1);
    data_.assign(offset, 0.0);
}

ModelParameters ModelParameters::initialized(const ModelShape& shape, std::uint64_t seed) {
    ModelParameters p(shape);
    Rng rng(seed);
    for (std::size_t k = 0; k < p.tensors_.size(); ++k) {
        const auto& t = p.tensors_[k];
        if (t.cols == 1) continue;  // biases and the scorer vector handled below
        const double limit = std::sqrt(6.0 / static_cast<double>(t.rows + t.cols));
        for (std::size_t i = 0; i < t.rows * t.cols; ++i) p.data_[t.offset + i] = rng.uniform(-limit, limit);
    }
    auto w = p.score_weight();
    const double limit = std::sqrt(6.0 / static_cast<double>(shape.code_length + 1));
    for (Eigen::Index i = 0; i < w.size(); ++i) w(i) = rng.uniform(-limit, limit);
    const auto h = static_cast<Eigen::Index>(shape.code_length);
    p.lstm_bias().segment(h, h).setOnes();
    return p;
}

MatrixView ModelParameters::tensor(std::size_t index) {
    const auto& t = tensors_.at(index);
    return MatrixView(data_.data() + t.offset, static_cast<Eigen::Index>(t.rows), static_cast<Eigen::Index>(t.cols));
}

ConstMatrixView ModelParameters::tensor(std::size_t index) const {
    const auto& t = tensors_.at(index);
    return ConstMatrixView(data_.data() + t.offset, static_cast<Eigen::Index>(t.rows),
                           static_cast<Eigen::Index>(t.cols));
}

VectorView ModelParameters::vector(std::size_t index) {
    const auto& t = tensors_.at(index);
    return VectorView(data_.data() + t.offset, static_cast<Eigen::Index>(t.rows * t.cols));
}

ConstVectorView ModelParameters::vector(std::size_t index) const {
    const auto& t = tensors_.at(index);
    return ConstVectorView(data_.data() + t.offset, static_cast<Eigen::Index>(t.rows * t.cols));
}

// ---------------------------------------------------------------------------
// Forward API

std::string_view to_string(Choice c) {
    return c == Choice::first ? "first" : "second";
}

Choice parse_choice(std::string_view s) {
    if (s == "first") return Choice::first;
    if (s == "second") return Choice::second;
    throw Error("bad choice '" + std::string(s) + "', expected first|second");
}

Eigen::VectorXd encode_item(const PathItem& item, const ModelParameters& params) {
    return encode_item_traced(item, params, nullptr);
}

Eigen::VectorXd encode_path(const FeaturizedPath& path, const ModelParameters& params) {
    return run_lstm(path, params, nullptr);
}

double score_path(const FeaturizedPath& path, const ModelParameters& params) {
    return forward(path, params, nullptr);
}

double predict_pair(double m1, double m2) {
    return sigmoid(m1 - m2);
}

double predict_pair(const FeaturizedPath& a, const FeaturizedPath& b, const ModelParameters& params) {
    return predict_pair(score_path(a, params), score_path(b, params));
}

double pair_nll(double m1, double m2, Choice label) {
    const double d = m1 - m2;
    return label == Choice::first ? softplus(-d) : softplus(d);
}

double nll_loss(std::span<const double> predictions, std::span<const Choice> labels) {
    if (predictions.size() != labels.size()) throw Error("nll_loss: size mismatch");
    if (predictions.empty()) return 0.0;
    double total = 0.0;
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        const double p = predictions[i];
        total += labels[i] == Choice::first ? -std::log(p) : -std::log1p(-p);
    }
    return total / static_cast<double>(predictions.size());
}

// ---------------------------------------------------------------------------
// Gradients

LossAndGradient backward(std::span<const FeaturizedPath> paths, std::span<const PairExample> batch,
                         const ModelParameters& params) {
    LossAndGradient out{0.0, ModelParameters(params.shape())};
    if (batch.empty()) return out;
    const double inv = 1.0 / static_cast<double>(batch.size());
    PathTrace ta, tb;
    for (const auto& ex : batch) {
        const auto& a = paths[ex.first];
        const auto& b = paths[ex.second];
        const double m1 = forward(a, params, &ta);
        const double m2 = forward(b, params, &tb);
        out.loss += pair_nll(m1, m2, ex.label);
        // d/d(m1 - m2) of -log P(label) is P(first) - 1[label = first].
        const double dd = (predict_pair(m1, m2) - (ex.label == Choice::first ? 1.0 : 0.0)) * inv;
        backprop(a, params, ta, dd, out.gradient);
        backprop(b, params, tb, -dd, out.gradient);
    }
    out.loss *= inv;
    return out;
}

double batch_loss(std::span<const FeaturizedPath> paths, std::span<const PairExample> batch,
                  const ModelParameters& params) {
    if (batch.empty()) return 0.0;
    double total = 0.0;
    for (const auto& ex : batch) {
        total += pair_nll(score_path(paths[ex.first], params), score_path(paths[ex.second], params), ex.label);
    }
    return total / static_cast<double>(batch.size());
}

void adam_step(std::span<double> params, std::span<const double> grads, AdamMoments& moments, std::size_t t,
               const AdamConfig& config) {
    if (t == 0) throw Error("adam_step: t must be at least 1");
    if (grads.size() != params.size()) throw Error("adam_step: size mismatch");
    moments.first.resize(params.size(), 0.0);
    moments.second.resize(params.size(), 0.0);
    const double c1 = 1.0 - std::pow(config.beta1, static_cast<double>(t));
    const double c2 = 1.0 - std::pow(config.beta2, static_cast<double>(t));
    for (std::size_t i = 0; i < params.size(); ++i) {
        const double g = grads[i];
        auto& m = moments.first[i];
        auto& v = moments.second[i];
        m = config.beta1 * m + (1.0 - config.beta1) * g;
        v = config.beta2 * v + (1.0 - config.beta2) * g * g;
        const double mhat = m / c1;
        const double vhat = v / c2;
        params[i] -= config.learning_rate * mhat / (std::sqrt(vhat) + config.epsilon);
    }
}

// ---------------------------------------------------------------------------
// Training

std::string TrainingConfig::to_json() const {
    nlohmann::json j;
    j["learning_rate"] = adam.learning_rate;
    j["beta1"] = adam.beta1;
    j["beta2"] = adam.beta2;
    j["epsilon"] = adam.epsilon;
    j["epochs"] = epochs;
    j["batch_size"] = batch_size;
    j["seed"] = seed;
    j["feature_width"] = feature_width;
    j["code_length"] = code_length;
    j["embedding_dim"] = embedding_dim;
    j["mask"] = mask.to_string();
    return j.dump();
}

TrainingConfig TrainingConfig::from_json(std::string_view text) {
    const auto j = nlohmann::json::parse(text);
    TrainingConfig c;
    c.adam.learning_rate = j.at("learning_rate").get<double>();
    c.adam.beta1 = j.at("beta1").get<double>();
    c.adam.beta2 = j.at("beta2").get<double>();
    c.adam.epsilon = j.at("epsilon").get<double>();
    c.epochs = j.at("epochs").get<std::size_t>();
    c.batch_size = j.at("batch_size").get<std::size_t>();
    c.seed = j.at("seed").get<std::uint64_t>();
    c.feature_width = j.at("feature_width").get<std::size_t>();
    c.code_length = j.at("code_length").get<std::size_t>();
    c.embedding_dim = j.at("embedding_dim").get<std::size_t>();
    const auto mask = j.at("mask").get<std::string>();
    c.mask = mask == "none" ? FeatureMask::none() : FeatureMask::parse(mask);
    return c;
}

std::uint64_t TrainingConfig::hash() const {
    return fnv1a(to_json());
}

TrainingDiverged::TrainingDiverged(std::size_t epoch, double loss)
    : Error("training diverged at epoch " + std::to_string(epoch) + " (loss " + std::to_string(loss) + ")"),
      epoch_(epoch) {}

TrainingResult train(std::span<const FeaturizedPath> paths, std::span<const PairExample> train_pairs,
                     const FeatureLayout& layout, const TrainingConfig& config,
                     std::span<const PairExample> heldout) {
    if (train_pairs.empty()) throw Error("train: empty training set");
    if (config.batch_size == 0 || config.epochs == 0) throw Error("train: batch size and epochs must be positive");
    for (const auto& ex : train_pairs) {
        if (ex.first >= paths.size() || ex.second >= paths.size()) throw Error("train: pair index out of range");
    }
    const ModelShape shape{layout, config.feature_width, config.code_length};
    TrainingResult result{ModelParameters::initialized(shape, mix64(config.seed)), {}};
    Rng order_rng(mix64(config.seed ^ 0x5bd1e995ULL));
    std::vector<std::size_t> order(train_pairs.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    AdamMoments moments;
    std::vector<PairExample> batch;
    std::size_t step = 0;
    for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
        order_rng.shuffle(std::span<std::size_t>(order));
        double total = 0.0;
        for (std::size_t begin = 0; begin < order.size(); begin += config.batch_size) {
            const auto end = std::min(order.size(), begin + config.batch_size);
            batch.clear();
            for (auto k = begin; k < end; ++k) batch.push_back(train_pairs[order[k]]);
            auto lg = backward(paths, batch, result.params);
            if (!std::isfinite(lg.loss)) throw TrainingDiverged(epoch, lg.loss);
            total += lg.loss * static_cast<double>(batch.size());
            adam_step(result.params.values(), lg.gradient.values(), moments, ++step, config.adam);
        }
        EpochLog entry;
        entry.epoch = epoch;
        entry.train_loss = total / static_cast<double>(order.size());
        if (!std::isfinite(entry.train_loss)) throw TrainingDiverged(epoch, entry.train_loss);
        if (!heldout.empty()) entry.heldout_accuracy = evaluate_accuracy(paths, heldout, result.params);
        result.log.push_back(entry);
    }
    return result;
}

// ---------------------------------------------------------------------------
// Evaluation

double pairwise_accuracy(std::span<const ScoredPair> pairs) {
    if (pairs.empty()) throw Error("accuracy: empty test set");
    double correct = 0.0;
    for (const auto& p : pairs) {
        if (p.first == p.second) {
            correct += 0.5;
        } else if ((p.first > p.second) == (p.label == Choice::first)) {
            correct += 1.0;
        }
    }
    return correct / static_cast<double>(pairs.size());
}

double evaluate_accuracy(std::span<const FeaturizedPath> paths, std::span<const PairExample> pairs,
                         const ModelParameters& params) {
    std::vector<double> scores(paths.size());
    std::vector<bool> done(paths.size(), false);
    std::vector<ScoredPair> scored;
    scored.reserve(pairs.size());
    auto score = [&](std::size_t i) {
        if (!done[i]) {
            scores[i] = score_path(paths[i], params);
            done[i] = true;
        }
        return scores[i];
    };
    for (const auto& ex : pairs) scored.push_back({score(ex.first), score(ex.second), ex.label});
    return pairwise_accuracy(scored);
}

// ---------------------------------------------------------------------------
// Checkpoints

namespace {

constexpr char kCheckpointMagic[8] = {'P', 'N', 'A', 'T', 'C', 'K', 'P', 'T'};
constexpr std::uint32_t kCheckpointVersion = 1;

void put_u32(std::ostream& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.put(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_u64(std::ostream& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out.put(static_cast<char>((v >> (8 * i)) & 0xff));
}

std::uint64_t get_uint(std::istream& in, int bytes) {
    std::uint64_t v = 0;
    for (int i = 0; i < bytes; ++i) {
        const int c = in.get();
        if (c == std::char_traits<char>::eof()) throw Error("checkpoint: truncated");
        v |= static_cast<std::uint64_t>(static_cast<unsigned char>(c)) << (8 * i);
    }
    return v;
}

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

}  // namespace

void save_checkpoint(std::ostream& out, const TrainingConfig& config, const ModelParameters& params) {
    const auto& shape = params.shape();
    nlohmann::json header;
    header["tool"] = kToolVersion;
    header["config"] = nlohmann::json::parse(config.to_json());
    header["config_hash"] = hex64(config.hash());
    header["shape"] = {{"vertex_dims", shape.layout.vertex_dims},
                       {"edge_dims", shape.layout.edge_dims},
                       {"feature_width", shape.feature_width},
                       {"code_length", shape.code_length}};
    const auto text = header.dump();
    out.write(kCheckpointMagic, sizeof kCheckpointMagic);
    put_u32(out, kCheckpointVersion);
    put_u64(out, text.size());
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    put_u32(out, static_cast<std::uint32_t>(params.tensors().size()));
    const auto values = params.values();
    for (const auto& t : params.tensors()) {
        put_u32(out, static_cast<std::uint32_t>(t.name.size()));
        out.write(t.name.data(), static_cast<std::streamsize>(t.name.size()));
        put_u64(out, t.rows);
        put_u64(out, t.cols);
        for (std::size_t i = 0; i < t.rows * t.cols; ++i) {
            std::uint64_t bits;
            std::memcpy(&bits, &values[t.offset + i], sizeof bits);
            put_u64(out, bits);
        }
    }
    if (!out) throw Error("checkpoint: write failed");
}

void save_checkpoint(const std::filesystem::path& file, const TrainingConfig& config, const ModelParameters& params) {
    std::ofstream out(file, std::ios::binary);
    if (!out) throw Error("cannot write checkpoint: " + file.string());
    save_checkpoint(out, config, params);
}

Checkpoint load_checkpoint(std::istream& in) {
    char magic[8];
    if (!in.read(magic, sizeof magic) || std::memcmp(magic, kCheckpointMagic, sizeof magic) != 0) {
        throw Error("checkpoint: bad magic");
    }
    const auto version = get_uint(in, 4);
    if (version != kCheckpointVersion) throw Error("checkpoint: unsupported version " + std::to_string(version));
    const auto len = get_uint(in, 8);
    std::string text(len, '\0');
    if (!in.read(text.data(), static_cast<std::streamsize>(len))) throw Error("checkpoint: truncated header");
    const auto header = nlohmann::json::parse(text);
    Checkpoint ck;
    ck.config = TrainingConfig::from_json(header.at("config").dump());
    ModelShape shape;
    const auto& s = header.at("shape");
    shape.layout.vertex_dims = s.at("vertex_dims").get<std::vector<std::size_t>>();
    shape.layout.edge_dims = s.at("edge_dims").get<std::vector<std::size_t>>();
    shape.feature_width = s.at("feature_width").get<std::size_t>();
    shape.code_length = s.at("code_length").get<std::size_t>();
    ck.params = ModelParameters(shape);
    const auto count = get_uint(in, 4);
    if (count != ck.params.tensors().size()) throw Error("checkpoint: tensor count mismatch");
    auto values = ck.params.values();
    for (const auto& t : ck.params.tensors()) {
        const auto name_len = get_uint(in, 4);
        std::string name(name_len, '\0');
        if (!in.read(name.data(), static_cast<std::streamsize>(name_len)) || name != t.name) {
            throw Error("checkpoint: unexpected tensor '" + name + "', expected '" + t.name + "'");
        }
        if (get_uint(in, 8) != t.rows || get_uint(in, 8) != t.cols) throw Error("checkpoint: shape mismatch for " + t.name);
        for (std::size_t i = 0; i < t.rows * t.cols; ++i) {
            const auto bits = get_uint(in, 8);
            std::memcpy(&values[t.offset + i], &bits, sizeof bits);
        }
    }
    return ck;
}

Checkpoint load_checkpoint(const std::filesystem::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw Error("cannot open checkpoint: " + file.string());
    return load_checkpoint(in);
}

}  // namespace pathnat
