#include <gtest/gtest.h>

#include <filesystem>

#include "skylink/keys.hpp"

using namespace skylink;

namespace {
Bytes random_bytes(std::size_t n, Rng& rng) {
    Bytes out(n);
    for (auto& b : out) b = static_cast<std::uint8_t>(rng() & 0xFF);
    return out;
}
} // namespace

TEST(Otp, Involution) {
    Rng rng(1);
    const auto m = random_bytes(333, rng);
    const auto k = random_bytes(400, rng);
    EXPECT_EQ(otp_crypt(otp_crypt(m, k), k), m);
    EXPECT_NE(otp_crypt(m, k), m);
}

TEST(Otp, ShortKey) {
    try {
        otp_crypt(Bytes(10), Bytes(9));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::short_key);
    }
}

TEST(Otp, ImageFitsTenKilobyteBudget) {
    Rng rng(2);
    KeyStore store;
    store.add({"budget", random_bytes(10000, rng), {"X", "G"}, {}, false});
    store.split("budget", 5340, "forward");
    store.split("budget", 4660, "reverse");
    const auto img = random_bytes(5340, rng);
    const auto back = random_bytes(4660, rng);
    const auto fwd_key = store.get("forward").bytes;
    EXPECT_EQ(otp_crypt(store.encrypt("forward", img), fwd_key), img);
    EXPECT_EQ(store.encrypt("reverse", back).size(), back.size());
}

TEST(KeyStoreTest, ReuseIsRejected) {
    KeyStore store;
    store.add({"k1", Bytes(16, 7), {"A", "B"}, {"pass-1"}, false});
    store.encrypt("k1", Bytes(8, 1));
    try {
        store.encrypt("k1", Bytes(8, 1));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::key_reuse);
    }
    EXPECT_THROW(store.add({"k1", Bytes(1), {"A", "B"}, {}, false}), Error);
    EXPECT_THROW(store.consume("missing"), Error);
}

TEST(KeyStoreTest, SaveLoadRoundTrip) {
    Rng rng(3);
    KeyStore store;
    store.add({"mx", random_bytes(64, rng), {"Micius", "Xinglong"}, {"pass-7"}, false});
    store.add({"mg", random_bytes(64, rng), {"Micius", "Graz"}, {"pass-9"}, false});
    store.consume("mg");
    const auto dir = std::filesystem::temp_directory_path() / "skylink_keys_roundtrip";
    std::filesystem::remove_all(dir);
    store.save(dir);
    EXPECT_TRUE(std::filesystem::exists(dir / "mx.bin"));
    EXPECT_TRUE(std::filesystem::exists(dir / "mx.json"));
    auto loaded = KeyStore::load(dir);
    EXPECT_EQ(loaded.get("mx"), store.get("mx"));
    EXPECT_EQ(loaded.get("mg"), store.get("mg"));
    EXPECT_THROW(loaded.consume("mg"), Error);
    std::filesystem::remove_all(dir);
}

TEST(Relay, XorAlgebra) {
    auto r = relay_exchange(Bytes{0xAB}, Bytes{0xCD});
    EXPECT_EQ(r.broadcast, Bytes{0x66});
    EXPECT_EQ(r.recovered, Bytes{0xCD});
    r = relay_exchange(Bytes{1, 2, 3}, Bytes{1, 2, 3});
    EXPECT_EQ(r.broadcast, (Bytes{0, 0, 0}));
    EXPECT_EQ(r.recovered, (Bytes{1, 2, 3}));
    try {
        relay_exchange(Bytes(3), Bytes(4));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::length_mismatch);
    }
}

TEST(Relay, RecoveryExactForRandomKeys) {
    Rng rng(4);
    for (int i = 0; i < 1000; ++i) {
        const std::size_t n = rng.below(300);
        const auto mx = random_bytes(n, rng);
        const auto mg = random_bytes(n, rng);
        ASSERT_EQ(relay_exchange(mx, mg).recovered, mg);
    }
}

TEST(Relay, StoreMarksInputsConsumed) {
    Rng rng(5);
    KeyStore store;
    store.add({"mx", random_bytes(100, rng), {"Xinglong", "Micius"}, {}, false});
    store.add({"mg", random_bytes(100, rng), {"Graz", "Micius"}, {}, false});
    const auto mg = store.get("mg").bytes;
    relay_exchange(store, "mx", "mg", "xg");
    EXPECT_TRUE(store.get("mx").consumed);
    EXPECT_TRUE(store.get("mg").consumed);
    EXPECT_EQ(store.get("xg").bytes, mg);
    EXPECT_EQ(store.get("xg").owners, (std::pair<std::string, std::string>{"Xinglong", "Graz"}));
    EXPECT_THROW(relay_exchange(store, "mx", "mg", "again"), Error);
}
