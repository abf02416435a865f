#pragma once

// One-time pad, key bookkeeping and trusted-relay key splicing.

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "bits.hpp"
#include "error.hpp"

namespace skylink {

using Bytes = std::vector<std::uint8_t>;

/// XOR with the first message.size() key bytes. Applying it twice restores
/// the message.
inline Bytes otp_crypt(const Bytes& message, const Bytes& key) {
    require(key.size() >= message.size(), ErrorKind::short_key,
            "key has " + std::to_string(key.size()) + " bytes, message needs " + std::to_string(message.size()));
    Bytes out(message.size());
    for (std::size_t i = 0; i < message.size(); ++i) out[i] = message[i] ^ key[i];
    return out;
}

struct KeyMaterial {
    std::string id;
    Bytes bytes;
    std::pair<std::string, std::string> owners;
    std::vector<std::string> provenance;
    bool consumed = false;

    bool operator==(const KeyMaterial&) const = default;
};

struct RelayBroadcast {
    Bytes broadcast;   // MX xor MG, published by the relay
    Bytes recovered;   // (MX xor MG) xor MX at the first station
};

/// Pure XOR splice: the relay publishes MX xor MG; the holder of MX recovers MG.
inline RelayBroadcast relay_exchange(const Bytes& mx, const Bytes& mg) {
    require(mx.size() == mg.size(), ErrorKind::length_mismatch, "relay keys differ in length");
    RelayBroadcast r;
    r.broadcast.resize(mx.size());
    for (std::size_t i = 0; i < mx.size(); ++i) r.broadcast[i] = mx[i] ^ mg[i];
    r.recovered.resize(mx.size());
    for (std::size_t i = 0; i < mx.size(); ++i) r.recovered[i] = r.broadcast[i] ^ mx[i];
    return r;
}

/// Keys with single-use enforcement. Every mutation holds the store lock.
class KeyStore {
public:
    KeyStore() = default;
    KeyStore(KeyStore&& other) noexcept {
        std::lock_guard lock(other.mutex_);
        keys_ = std::move(other.keys_);
    }
    KeyStore& operator=(KeyStore&& other) noexcept {
        if (this != &other) {
            std::scoped_lock lock(mutex_, other.mutex_);
            keys_ = std::move(other.keys_);
        }
        return *this;
    }

    void add(KeyMaterial key) {
        std::lock_guard lock(mutex_);
        require(!key.id.empty(), ErrorKind::validation, "key id must not be empty");
        require(!keys_.count(key.id), ErrorKind::validation, "duplicate key id '" + key.id + "'");
        keys_.emplace(key.id, std::move(key));
    }

    bool contains(const std::string& id) const {
        std::lock_guard lock(mutex_);
        return keys_.count(id) != 0;
    }

    KeyMaterial get(const std::string& id) const {
        std::lock_guard lock(mutex_);
        return find(id);
    }

    std::vector<std::string> ids() const {
        std::lock_guard lock(mutex_);
        std::vector<std::string> out;
        for (const auto& [id, _] : keys_) out.push_back(id);
        return out;
    }

    std::size_t available_bytes() const {
        std::lock_guard lock(mutex_);
        std::size_t n = 0;
        for (const auto& [_, k] : keys_) {
            if (!k.consumed) n += k.bytes.size();
        }
        return n;
    }

    /// Marks `id` consumed and returns its bytes; a second call fails.
    Bytes consume(const std::string& id) {
        std::lock_guard lock(mutex_);
        KeyMaterial& k = find(id);
        require(!k.consumed, ErrorKind::key_reuse, "key '" + id + "' was already used");
        k.consumed = true;
        return k.bytes;
    }

    /// Splits `n` bytes off the front of `id` into a new key `new_id`; the
    /// remainder stays available under `id`.
    void split(const std::string& id, std::size_t n, const std::string& new_id) {
        std::lock_guard lock(mutex_);
        KeyMaterial& k = find(id);
        require(!k.consumed, ErrorKind::key_reuse, "key '" + id + "' was already used");
        require(n <= k.bytes.size(), ErrorKind::insufficient_key,
                "key '" + id + "' holds " + std::to_string(k.bytes.size()) + " bytes, " + std::to_string(n) +
                    " requested");
        require(!keys_.count(new_id), ErrorKind::validation, "duplicate key id '" + new_id + "'");
        KeyMaterial part{new_id, Bytes(k.bytes.begin(), k.bytes.begin() + static_cast<std::ptrdiff_t>(n)), k.owners,
                         k.provenance, false};
        part.provenance.push_back("split:" + id);
        k.bytes.erase(k.bytes.begin(), k.bytes.begin() + static_cast<std::ptrdiff_t>(n));
        keys_.emplace(new_id, std::move(part));
    }

    /// Encrypts with key `id` and consumes it.
    Bytes encrypt(const std::string& id, const Bytes& message) {
        const Bytes key = consume(id);
        return otp_crypt(message, key);
    }

    /// Keys as <id>.bin plus a JSON sidecar <id>.json per key.
    void save(const std::filesystem::path& dir) const {
        std::lock_guard lock(mutex_);
        std::error_code ec;
        std::filesystem::create_directories(dir, ec);
        require(!ec, ErrorKind::io, "cannot create " + dir.string() + ": " + ec.message());
        for (const auto& [id, k] : keys_) {
            std::ofstream bin(dir / (id + ".bin"), std::ios::binary);
            bin.write(reinterpret_cast<const char*>(k.bytes.data()), static_cast<std::streamsize>(k.bytes.size()));
            nlohmann::json meta{{"id", id},
                                {"owners", {k.owners.first, k.owners.second}},
                                {"length_bytes", k.bytes.size()},
                                {"consumed", k.consumed},
                                {"provenance", k.provenance}};
            std::ofstream side(dir / (id + ".json"));
            side << meta.dump(2) << '\n';
            require(bin.good() && side.good(), ErrorKind::io, "failed writing key '" + id + "'");
        }
    }

    static KeyStore load(const std::filesystem::path& dir) {
        KeyStore store;
        require(std::filesystem::is_directory(dir), ErrorKind::io, dir.string() + " is not a directory");
        std::vector<std::filesystem::path> sidecars;
        for (const auto& entry : std::filesystem::directory_iterator(dir)) {
            if (entry.path().extension() == ".json") sidecars.push_back(entry.path());
        }
        std::sort(sidecars.begin(), sidecars.end());
        for (const auto& path : sidecars) {
            std::ifstream side(path);
            nlohmann::json meta;
            try {
                side >> meta;
            } catch (const nlohmann::json::exception& e) {
                throw Error(ErrorKind::parse, path.string() + ": " + e.what());
            }
            KeyMaterial k;
            k.id = meta.at("id").get<std::string>();
            k.owners = {meta.at("owners").at(0).get<std::string>(), meta.at("owners").at(1).get<std::string>()};
            k.consumed = meta.at("consumed").get<bool>();
            k.provenance = meta.at("provenance").get<std::vector<std::string>>();
            const auto length = meta.at("length_bytes").get<std::size_t>();
            std::ifstream bin(dir / (k.id + ".bin"), std::ios::binary);
            k.bytes.assign(std::istreambuf_iterator<char>(bin), std::istreambuf_iterator<char>());
            require(k.bytes.size() == length, ErrorKind::io, "key file for '" + k.id + "' has the wrong length");
            store.add(std::move(k));
        }
        return store;
    }

private:
    KeyMaterial& find(const std::string& id) {
        auto it = keys_.find(id);
        require(it != keys_.end(), ErrorKind::insufficient_key, "no key with id '" + id + "'");
        return it->second;
    }
    const KeyMaterial& find(const std::string& id) const {
        auto it = keys_.find(id);
        require(it != keys_.end(), ErrorKind::insufficient_key, "no key with id '" + id + "'");
        return it->second;
    }

    mutable std::mutex mutex_;
    std::map<std::string, KeyMaterial> keys_;
};

/// Relay step over a store: consumes MX (shared X-relay) and MG (shared
/// G-relay) and registers the spliced key MG as shared by X and G.
inline RelayBroadcast relay_exchange(KeyStore& store, const std::string& mx_id, const std::string& mg_id,
                                     const std::string& shared_id) {
    const KeyMaterial mx = store.get(mx_id);
    const KeyMaterial mg = store.get(mg_id);
    require(mx.bytes.size() == mg.bytes.size(), ErrorKind::length_mismatch, "relay keys differ in length");
    store.consume(mx_id);
    store.consume(mg_id);
    auto r = relay_exchange(mx.bytes, mg.bytes);
    store.add(KeyMaterial{shared_id, r.recovered, {mx.owners.first, mg.owners.first}, {"relay:" + mx_id, "relay:" + mg_id}, false});
    return r;
}

} // namespace skylink
