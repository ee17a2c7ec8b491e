#include "corpsim/sgns.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <unordered_map>

#include "corpsim/errors.hpp"
#include "corpsim/hash.hpp"
#include "corpsim/rng.hpp"

namespace corpsim {

void TrainParams::validate() const {
  if (dim < 1) throw ConfigError("dim must be >= 1");
  if (window < 1) throw ConfigError("window must be >= 1");
  if (negatives < 1) throw ConfigError("negatives must be >= 1");
  if (epochs < 1) throw ConfigError("epochs must be >= 1");
  if (!(initial_lr > 0.0)) throw ConfigError("initial learning rate must be positive");
  if (minn > maxn) throw ConfigError("minn must not exceed maxn");
  if (maxn > 0 && minn == 0) throw ConfigError("minn must be >= 1 when subwords are enabled");
  if (maxn > 0 && buckets == 0) throw ConfigError("bucket count must be positive when subwords are enabled");
  if (!(subsample > 0.0)) throw ConfigError("subsampling threshold must be positive");
}

nlohmann::json to_json(const TrainParams& p) {
  return nlohmann::json{{"dim", p.dim},         {"window", p.window},       {"negatives", p.negatives},
                        {"epochs", p.epochs},   {"initial_lr", p.initial_lr}, {"min_count", p.min_count},
                        {"minn", p.minn},       {"maxn", p.maxn},           {"buckets", p.buckets},
                        {"subsample", p.subsample}, {"seed", p.seed}};
}

TrainParams train_params_from_json(const nlohmann::json& j) {
  TrainParams p;
  if (!j.is_object()) throw ConfigError("training parameters must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    const auto count = [&] {
      // get<size_t>() would silently wrap negative numbers.
      const bool ok = value.is_number_unsigned() || (value.is_number_integer() && value.get<std::int64_t>() >= 0);
      if (!ok) {
        throw ConfigError("training parameter '" + key + "' must be a non-negative integer");
      }
      return value.get<std::size_t>();
    };
    try {
      if (key == "dim") p.dim = count();
      else if (key == "window") p.window = count();
      else if (key == "negatives") p.negatives = count();
      else if (key == "epochs") p.epochs = count();
      else if (key == "initial_lr") p.initial_lr = value.get<double>();
      else if (key == "min_count") p.min_count = count();
      else if (key == "minn") p.minn = count();
      else if (key == "maxn") p.maxn = count();
      else if (key == "buckets") p.buckets = count();
      else if (key == "subsample") p.subsample = value.get<double>();
      else if (key == "seed") p.seed = count();
      else throw ConfigError("unknown training parameter '" + key + "'");
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError("training parameter '" + key + "': " + e.what());
    }
  }
  p.validate();
  return p;
}

std::vector<std::string> char_ngrams(std::string_view word, std::size_t minn, std::size_t maxn) {
  std::vector<std::string> out;
  if (maxn == 0) return out;
  const std::string bounded = "<" + std::string(word) + ">";
  std::vector<std::size_t> starts;
  for (std::size_t pos = 0; pos < bounded.size();
       pos += detail::utf8_len(static_cast<unsigned char>(bounded[pos]))) {
    starts.push_back(pos);
  }
  starts.push_back(bounded.size());
  const std::size_t points = starts.size() - 1;
  for (std::size_t n = minn; n <= maxn; ++n) {
    for (std::size_t i = 0; i + n <= points; ++i) {
      out.push_back(bounded.substr(starts[i], starts[i + n] - starts[i]));
    }
  }
  return out;
}

std::size_t subword_bucket(std::string_view ngram, std::size_t buckets) noexcept {
  return static_cast<std::size_t>(fnv1a64(ngram) % buckets);
}

namespace {

struct Vocab {
  std::vector<std::string> words;
  std::vector<std::uint64_t> counts;
  std::unordered_map<std::string_view, std::uint32_t> index;
};

Vocab build_vocab(std::span<const std::string> tokens, std::size_t min_count) {
  std::unordered_map<std::string_view, std::uint64_t> counts;
  for (const auto& t : tokens) ++counts[t];
  std::vector<std::pair<std::string_view, std::uint64_t>> kept;
  for (const auto& [w, c] : counts) {
    if (c >= min_count) kept.emplace_back(w, c);
  }
  std::sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second > b.second : a.first < b.first;
  });
  Vocab v;
  v.words.reserve(kept.size());
  for (const auto& [w, c] : kept) {
    v.words.emplace_back(w);
    v.counts.push_back(c);
  }
  for (std::uint32_t i = 0; i < v.words.size(); ++i) v.index.emplace(v.words[i], i);
  return v;
}

class Trainer {
 public:
  Trainer(std::span<const std::string> tokens, const TrainParams& params) : params_(params) {
    vocab_ = build_vocab(tokens, params.min_count);
    if (vocab_.words.empty()) {
      throw TrainError("no token occurs at least " + std::to_string(params.min_count) + " times");
    }
    ids_.reserve(tokens.size());
    for (const auto& t : tokens) {
      const auto it = vocab_.index.find(t);
      if (it != vocab_.index.end()) ids_.push_back(it->second);
    }
    const std::size_t nwords = vocab_.words.size();
    const std::size_t rows = nwords + (params.maxn > 0 ? params.buckets : 0);
    dim_ = params.dim;

    Rng init(subseed(params.seed, "sgns/init"));
    input_.resize(rows * dim_);
    const double bound = 1.0 / static_cast<double>(dim_);
    for (auto& x : input_) x = static_cast<float>((init.uniform01() * 2.0 - 1.0) * bound);
    output_.assign(nwords * dim_, 0.0f);

    subwords_.resize(nwords);
    for (std::size_t w = 0; w < nwords; ++w) {
      subwords_[w].push_back(static_cast<std::uint32_t>(w));
      for (const auto& g : char_ngrams(vocab_.words[w], params.minn, params.maxn)) {
        subwords_[w].push_back(static_cast<std::uint32_t>(nwords + subword_bucket(g, params.buckets)));
      }
    }

    build_negative_table();
    build_discard_table();
  }

  EmbeddingSet run(TrainStats* stats) {
    Rng rng(subseed(params_.seed, "sgns/train"));
    const std::size_t total = ids_.size() * params_.epochs;
    std::size_t processed = 0;
    constexpr std::size_t kBlock = 1000;

    std::vector<float> hidden(dim_), grad(dim_);
    std::vector<float*> rows(params_.negatives + 1);
    std::vector<std::uint32_t> block;
    block.reserve(kBlock);
    std::vector<double> epoch_loss;

    for (std::size_t epoch = 0; epoch < params_.epochs; ++epoch) {
      double loss_sum = 0.0;
      std::size_t updates = 0;
      for (std::size_t start = 0; start < ids_.size(); start += kBlock) {
        const std::size_t end = std::min(ids_.size(), start + kBlock);
        const float lr = static_cast<float>(
            params_.initial_lr * (1.0 - static_cast<double>(processed) / static_cast<double>(total)));
        processed += end - start;
        block.clear();
        for (std::size_t i = start; i < end; ++i) {
          if (rng.uniform01() < keep_prob_[ids_[i]]) block.push_back(ids_[i]);
        }
        for (std::size_t c = 0; c < block.size(); ++c) {
          const auto reach = static_cast<std::ptrdiff_t>(1 + rng.uniform(params_.window));
          const auto& sub = subwords_[block[c]];
          for (std::ptrdiff_t off = -reach; off <= reach; ++off) {
            const auto ctx = static_cast<std::ptrdiff_t>(c) + off;
            if (off == 0 || ctx < 0 || ctx >= static_cast<std::ptrdiff_t>(block.size())) continue;
            loss_sum += update(sub, block[static_cast<std::size_t>(ctx)], lr, rng, hidden, grad, rows);
            ++updates;
          }
        }
      }
      epoch_loss.push_back(updates ? loss_sum / static_cast<double>(updates) : 0.0);
    }

    if (stats) {
      stats->epoch_loss = std::move(epoch_loss);
      stats->vocab_size = vocab_.words.size();
    }
    return export_vectors();
  }

 private:
  void build_negative_table() {
    double z = 0.0;
    for (auto c : vocab_.counts) z += std::pow(static_cast<double>(c), 0.75);
    negatives_.reserve(kNegativeTableSize);
    for (std::uint32_t w = 0; w < vocab_.counts.size(); ++w) {
      const double share = std::pow(static_cast<double>(vocab_.counts[w]), 0.75) / z;
      const auto copies = static_cast<std::size_t>(share * static_cast<double>(kNegativeTableSize));
      negatives_.insert(negatives_.end(), std::max<std::size_t>(copies, 1), w);
    }
  }

  void build_discard_table() {
    double total = 0.0;
    for (auto c : vocab_.counts) total += static_cast<double>(c);
    keep_prob_.resize(vocab_.counts.size());
    for (std::size_t w = 0; w < vocab_.counts.size(); ++w) {
      const double f = static_cast<double>(vocab_.counts[w]) / total;
      const double ratio = params_.subsample / f;
      keep_prob_[w] = std::sqrt(ratio) + ratio;
    }
  }

  double update(const std::vector<std::uint32_t>& sub, std::uint32_t target, float lr, Rng& rng,
                std::vector<float>& hidden, std::vector<float>& grad, std::vector<float*>& rows) {
    std::fill(hidden.begin(), hidden.end(), 0.0f);
    for (auto r : sub) {
      const float* v = input_.data() + static_cast<std::size_t>(r) * dim_;
      for (std::size_t i = 0; i < dim_; ++i) hidden[i] += v[i];
    }
    const float inv = 1.0f / static_cast<float>(sub.size());
    for (auto& h : hidden) h *= inv;

    std::size_t n = 0;
    rows[n++] = output_.data() + static_cast<std::size_t>(target) * dim_;
    if (vocab_.words.size() > 1) {
      for (std::size_t k = 0; k < params_.negatives; ++k) {
        std::uint32_t neg;
        do {
          neg = negatives_[rng.uniform(negatives_.size())];
        } while (neg == target);
        rows[n++] = output_.data() + static_cast<std::size_t>(neg) * dim_;
      }
    }
    std::fill(grad.begin(), grad.end(), 0.0f);
    const float loss = negative_sampling_step<float>(hidden, std::span<float* const>(rows.data(), n), lr, grad);
    // Every input row takes the full hidden-layer step, as in fastText.
    for (auto r : sub) {
      float* v = input_.data() + static_cast<std::size_t>(r) * dim_;
      for (std::size_t i = 0; i < dim_; ++i) v[i] += grad[i];
    }
    return loss;
  }

  EmbeddingSet export_vectors() const {
    EmbeddingSet embs(dim_);
    std::vector<double> v(dim_);
    for (std::size_t w = 0; w < vocab_.words.size(); ++w) {
      std::fill(v.begin(), v.end(), 0.0);
      for (auto r : subwords_[w]) {
        const float* row = input_.data() + static_cast<std::size_t>(r) * dim_;
        for (std::size_t i = 0; i < dim_; ++i) v[i] += row[i];
      }
      const double inv = 1.0 / static_cast<double>(subwords_[w].size());
      for (auto& x : v) x = static_cast<double>(static_cast<float>(x * inv));
      embs.add(vocab_.words[w], v);
    }
    return embs;
  }

  TrainParams params_;
  Vocab vocab_;
  std::vector<std::uint32_t> ids_;
  std::size_t dim_ = 0;
  std::vector<float> input_;
  std::vector<float> output_;
  std::vector<std::vector<std::uint32_t>> subwords_;
  std::vector<std::uint32_t> negatives_;
  std::vector<double> keep_prob_;
};

}  // namespace

EmbeddingSet train_embeddings(std::span<const std::string> tokens, const TrainParams& params, TrainStats* stats) {
  params.validate();
  Trainer trainer(tokens, params);
  auto embs = trainer.run(stats);
  if (stats) {
    stats->corpus_tokens = tokens.size();
    stats->corpus_hash = hash_tokens(tokens);
  }
  return embs;
}

EmbeddingSet train_embeddings(const TokenStream& stream, const TrainParams& params, TrainStats* stats) {
  return train_embeddings(std::span<const std::string>(stream.tokens), params, stats);
}

void save_training_sidecar(const std::filesystem::path& path, const TrainParams& params, const TrainStats& stats) {
  nlohmann::json j{{"train_params", to_json(params)},
                   {"corpus_tokens", stats.corpus_tokens},
                   {"corpus_hash", hex64(stats.corpus_hash)},
                   {"vocab_size", stats.vocab_size},
                   {"epoch_loss", stats.epoch_loss},
                   {"negative_table_size", kNegativeTableSize},
                   {"subword_hash", "fnv1a64 mod buckets"}};
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

}  // namespace corpsim
