#pragma once

// Ground-station (server) and satellite (client) model state, the
// asynchronous FedSat aggregation rule and the synchronous FedAvg baseline.

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "satfl/learning.hpp"

namespace satfl::federation {

using learning::ModelParams;

// What a satellite sends up: its previous and new trained parameters. On the
// wire only the difference travels, so S(w) counts one parameter vector.
struct UpdateMessage {
    int satellite = 0;
    ModelParams previous;  // w_k^{n_k-1, I}
    ModelParams updated;   // w_k^{n_k, I}
    double download_time_s = 0.0;
    std::uint64_t download_epoch = 0;
};

class ServerState {
public:
    // data_sizes[k] = D_k; aggregation weights are D_k / sum D.
    ServerState(ModelParams initial, std::span<const std::size_t> data_sizes);

    const ModelParams& global() const { return global_; }
    std::uint64_t epoch() const { return epoch_; }
    int satellite_count() const { return static_cast<int>(weights_.size()); }
    double weight(int satellite) const;
    std::span<const double> weights() const { return weights_; }
    const std::optional<ModelParams>& last_upload(int satellite) const;
    std::uint64_t uploads(int satellite) const;

private:
    friend void fedsat_aggregate(ServerState& server, const UpdateMessage& msg);
    friend void fedavg_sync_aggregate(ServerState& server, std::span<const UpdateMessage> updates);

    void check_satellite(int satellite) const;

    ModelParams global_;
    std::uint64_t epoch_ = 0;
    std::vector<double> weights_;
    std::vector<std::optional<ModelParams>> last_upload_;
    std::vector<std::uint64_t> uploads_;
};

// w^{n+1} = w^n - alpha_k (w_k^{n_k-1,I} - w_k^{n_k,I}); n += 1.
void fedsat_aggregate(ServerState& server, const UpdateMessage& msg);

// w^{n+1} = sum_k alpha_k w_k^{n_k,I}. Needs exactly one update per satellite.
void fedavg_sync_aggregate(ServerState& server, std::span<const UpdateMessage> updates);

class ClientState {
public:
    explicit ClientState(int satellite) : satellite_(satellite) {}

    int satellite() const { return satellite_; }
    std::uint64_t local_counter() const { return local_counter_; }
    bool has_global() const { return cached_global_.has_value(); }
    const ModelParams& cached_global() const;
    double download_time_s() const { return download_time_s_; }
    std::uint64_t download_epoch() const { return download_epoch_; }
    bool has_pending_update() const { return pending_.has_value(); }

    // Caches the global model. The first download also becomes the
    // "previous update" operand of the first upload.
    void receive_global(const ModelParams& global, double now_s, std::uint64_t epoch);
    void finish_training(ModelParams trained);
    // Packs the pending update and advances n_k.
    UpdateMessage make_update();

private:
    int satellite_;
    std::uint64_t local_counter_ = 0;
    std::optional<ModelParams> cached_global_;
    double download_time_s_ = 0.0;
    std::uint64_t download_epoch_ = 0;
    std::optional<ModelParams> previous_trained_;
    std::optional<ModelParams> pending_;
};

struct StalenessRecord {
    double time_s = 0.0;
    int satellite = 0;
    std::uint64_t epoch_staleness = 0;
    double time_staleness_s = 0.0;
};

// Call before the update is applied: epoch staleness is the number of global
// epochs that passed since the satellite downloaded its starting model.
StalenessRecord record_staleness(const UpdateMessage& msg, double now_s, const ServerState& server);

}  // namespace satfl::federation
