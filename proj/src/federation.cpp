#include "satfl/federation.hpp"

#include <numeric>
#include <string>

#include "satfl/error.hpp"

namespace satfl::federation {

ServerState::ServerState(ModelParams initial, std::span<const std::size_t> data_sizes)
    : global_(std::move(initial)),
      last_upload_(data_sizes.size()),
      uploads_(data_sizes.size(), 0) {
    const double total = static_cast<double>(std::accumulate(data_sizes.begin(), data_sizes.end(), std::size_t{0}));
    if (!data_sizes.empty() && total <= 0.0) throw DomainError("total dataset size must be positive");
    weights_.reserve(data_sizes.size());
    for (std::size_t d : data_sizes) weights_.push_back(static_cast<double>(d) / total);
}

void ServerState::check_satellite(int satellite) const {
    if (satellite < 0 || satellite >= satellite_count()) {
        throw DomainError("unknown satellite " + std::to_string(satellite));
    }
}

double ServerState::weight(int satellite) const {
    check_satellite(satellite);
    return weights_[static_cast<std::size_t>(satellite)];
}

const std::optional<ModelParams>& ServerState::last_upload(int satellite) const {
    check_satellite(satellite);
    return last_upload_[static_cast<std::size_t>(satellite)];
}

std::uint64_t ServerState::uploads(int satellite) const {
    check_satellite(satellite);
    return uploads_[static_cast<std::size_t>(satellite)];
}

void fedsat_aggregate(ServerState& server, const UpdateMessage& msg) {
    server.check_satellite(msg.satellite);
    const std::size_t n = server.global_.dimension();
    if (msg.previous.dimension() != n || msg.updated.dimension() != n) {
        throw DomainError("update dimension does not match the global model");
    }
    const auto k = static_cast<std::size_t>(msg.satellite);
    const double alpha = server.weights_[k];
    auto& w = server.global_.values;
    for (std::size_t i = 0; i < n; ++i) w[i] -= alpha * (msg.previous.values[i] - msg.updated.values[i]);
    ++server.epoch_;
    server.last_upload_[k] = msg.updated;
    ++server.uploads_[k];
}

void fedavg_sync_aggregate(ServerState& server, std::span<const UpdateMessage> updates) {
    const auto K = static_cast<std::size_t>(server.satellite_count());
    std::vector<const UpdateMessage*> by_sat(K, nullptr);
    for (const auto& u : updates) {
        server.check_satellite(u.satellite);
        auto& slot = by_sat[static_cast<std::size_t>(u.satellite)];
        if (slot) throw DomainError("duplicate update from satellite " + std::to_string(u.satellite));
        if (u.updated.dimension() != server.global_.dimension()) {
            throw DomainError("update dimension does not match the global model");
        }
        slot = &u;
    }
    for (std::size_t k = 0; k < K; ++k) {
        if (!by_sat[k]) throw DomainError("synchronous round is missing satellite " + std::to_string(k));
    }

    std::vector<double> next(server.global_.dimension(), 0.0);
    for (std::size_t k = 0; k < K; ++k) {
        const double alpha = server.weights_[k];
        const auto& v = by_sat[k]->updated.values;
        for (std::size_t i = 0; i < next.size(); ++i) next[i] += alpha * v[i];
    }
    if (K > 0) server.global_.values = std::move(next);
    ++server.epoch_;
    for (std::size_t k = 0; k < K; ++k) {
        server.last_upload_[k] = by_sat[k]->updated;
        ++server.uploads_[k];
    }
}

const ModelParams& ClientState::cached_global() const {
    if (!cached_global_) throw DomainError("satellite " + std::to_string(satellite_) + " holds no global model");
    return *cached_global_;
}

void ClientState::receive_global(const ModelParams& global, double now_s, std::uint64_t epoch) {
    cached_global_ = global;
    download_time_s_ = now_s;
    download_epoch_ = epoch;
    if (!previous_trained_) previous_trained_ = global;
}

void ClientState::finish_training(ModelParams trained) { pending_ = std::move(trained); }

UpdateMessage ClientState::make_update() {
    if (!pending_) throw DomainError("satellite " + std::to_string(satellite_) + " has no trained update");
    UpdateMessage msg;
    msg.satellite = satellite_;
    msg.previous = *previous_trained_;
    msg.updated = std::move(*pending_);
    msg.download_time_s = download_time_s_;
    msg.download_epoch = download_epoch_;
    pending_.reset();
    previous_trained_ = msg.updated;
    ++local_counter_;
    return msg;
}

StalenessRecord record_staleness(const UpdateMessage& msg, double now_s, const ServerState& server) {
    StalenessRecord r;
    r.time_s = now_s;
    r.satellite = msg.satellite;
    r.epoch_staleness = server.epoch() - msg.download_epoch;
    r.time_staleness_s = now_s - msg.download_time_s;
    return r;
}

}  // namespace satfl::federation
