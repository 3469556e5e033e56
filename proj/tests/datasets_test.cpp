// Copyright 2026 The qhead Authors
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

#include <gtest/gtest.h>

#include <bit>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <set>

#include "qhead/baselines.hpp"
#include "qhead/datasets.hpp"
#include "qhead/trainer.hpp"

namespace qhead {
namespace {

namespace fs = std::filesystem;

fs::path temp_path(const std::string &name) {
    const auto dir = fs::temp_directory_path() / "qhead_datasets_test";
    fs::create_directories(dir);
    return dir / name;
}

std::string slurp(const fs::path &p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void spit(const fs::path &p, const std::string &bytes) {
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

void put_u32(std::string &s, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) {
        s.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
    }
}

// Two rows of dimension 3, written byte by byte.
std::string handcrafted_bytes() {
    std::string s = "EMB1";
    put_u32(s, 3);
    put_u32(s, 2);
    for (float f : {1.0F, -2.5F, 0.125F, 3.0e-7F, 42.0F, -0.0F}) {
        put_u32(s, std::bit_cast<std::uint32_t>(f));
    }
    s.push_back(1);
    s.push_back(0);
    return s;
}

TEST(Emb1, HandcraftedFileLoadsAndRoundTripsBitExactly) {
    const auto in = temp_path("hand.emb");
    spit(in, handcrafted_bytes());
    const auto ds = load_embeddings(in);
    ASSERT_EQ(ds.dim, 3U);
    ASSERT_EQ(ds.size(), 2U);
    EXPECT_EQ(ds.labels, (std::vector<int>{1, 0}));
    EXPECT_EQ(ds.values[1], -2.5);
    EXPECT_EQ(ds.values[3], static_cast<double>(3.0e-7F));
    EXPECT_TRUE(std::signbit(ds.values[5]));
    const auto out = temp_path("hand_out.emb");
    save_embeddings(ds, out);
    EXPECT_EQ(slurp(out), handcrafted_bytes());
}

TEST(Emb1, CsvAndBinaryDecodeToTheSameDataset) {
    const auto ds = synthetic_clusters(ClusterSpec{5, 7, 3.0, 12});
    const auto bin = temp_path("same.emb");
    const auto csv = temp_path("same.csv");
    save_embeddings(ds, bin);
    save_embeddings(ds, csv);
    const auto a = load_embeddings(bin);
    const auto b = load_embeddings(csv);
    EXPECT_EQ(a, b);
    EXPECT_EQ(a, ds);
    // Re-encoding the CSV-loaded data reproduces both files byte for byte.
    EXPECT_EQ(encode_embeddings(b, DatasetFormat::Binary), slurp(bin));
    EXPECT_EQ(encode_embeddings(a, DatasetFormat::Csv), slurp(csv));
}

TEST(Emb1, CsvHeaderAndRowLayout) {
    EmbeddingDataset ds;
    ds.dim = 2;
    ds.values = {0.5, -1.0, 1e-3, 2.0};
    ds.labels = {0, 1};
    EXPECT_EQ(encode_embeddings(ds, DatasetFormat::Csv), "label,f0,f1\n0,0.5,-1\n1,0.001,2\n");
}

TEST(Emb1, TruncatedFileNamesExpectedAndActualLength) {
    auto bytes = handcrafted_bytes();
    bytes.pop_back();
    try {
        detail::parse_binary(bytes, 2);
        FAIL() << "expected FormatError";
    } catch (const FormatError &e) {
        const std::string msg = e.what();
        EXPECT_NE(msg.find("expected 38"), std::string::npos) << msg;
        EXPECT_NE(msg.find("got 37"), std::string::npos) << msg;
        EXPECT_EQ(e.offset(), 37U);
    }
    EXPECT_THROW(detail::parse_binary(bytes.substr(0, 9), 2), FormatError);
}

TEST(Emb1, TrailingBytesAreRejected) {
    auto bytes = handcrafted_bytes() + "x";
    EXPECT_THROW(detail::parse_binary(bytes, 2), FormatError);
}

TEST(Emb1, BadMagicFailsAtOffsetZero) {
    auto bytes = handcrafted_bytes();
    bytes[3] = '2';
    try {
        detail::parse_binary(bytes, 2);
        FAIL() << "expected FormatError";
    } catch (const FormatError &e) {
        EXPECT_EQ(e.offset(), 0U);
    }
}

TEST(Emb1, ZeroDimensionIsAFormatError) {
    std::string s = "EMB1";
    put_u32(s, 0);
    put_u32(s, 0);
    EXPECT_THROW(detail::parse_binary(s, 2), FormatError);
}

TEST(Emb1, LabelAtLeastKIsADataError) {
    auto bytes = handcrafted_bytes();
    bytes.back() = 2;
    EXPECT_THROW(detail::parse_binary(bytes, 2), DataError);
    EXPECT_NO_THROW(detail::parse_binary(bytes, 3));
    EXPECT_THROW(detail::parse_csv("label,f0\n5,1.0\n", 2), DataError);
}

TEST(Emb1, MalformedCsvReportsOffsets) {
    EXPECT_THROW(detail::parse_csv("lbl,f0\n", 2), FormatError);
    EXPECT_THROW(detail::parse_csv("label,f1\n", 2), FormatError);
    EXPECT_THROW(detail::parse_csv("label\n", 2), FormatError);
    try {
        detail::parse_csv("label,f0,f1\n0,1.0,abc\n", 2);
        FAIL() << "expected FormatError";
    } catch (const FormatError &e) {
        EXPECT_EQ(e.offset(), 18U);
    }
    EXPECT_THROW(detail::parse_csv("label,f0,f1\n0,1.0\n", 2), FormatError);
    EXPECT_THROW(detail::parse_csv("label,f0,f1\n0,1.0,2,3\n", 2), FormatError);
    EXPECT_THROW(detail::parse_csv("label,f0\nx,1.0\n", 2), FormatError);
}

TEST(Emb1, CsvAcceptsCrLfAndBlankLines) {
    const auto ds = detail::parse_csv("label,f0\r\n1,2.5\r\n\r\n0,-1\r\n", 2);
    EXPECT_EQ(ds.labels, (std::vector<int>{1, 0}));
    EXPECT_EQ(ds.values, (std::vector<double>{2.5, -1.0}));
}

TEST(Emb1, MissingFileIsADataError) {
    EXPECT_THROW(load_embeddings(temp_path("does_not_exist.emb")), DataError);
}

EmbeddingDataset corpus(std::size_t n_pos, std::size_t n_neg) {
    EmbeddingDataset ds;
    ds.dim = 1;
    for (std::size_t i = 0; i < n_pos + n_neg; ++i) {
        ds.values.push_back(static_cast<double>(i));
        ds.labels.push_back(i < n_pos ? 1 : 0);
    }
    return ds;
}

TEST(Splits, FullCorpusSizes) {
    const auto ds = make_standard_splits(corpus(4750, 4863), 0);
    EXPECT_EQ(ds.splits.test.size(), 9101U);
    EXPECT_EQ(ds.splits.train.size(), 436U);
    EXPECT_EQ(ds.splits.validation.size(), 76U);
    std::size_t pos_train = 0;
    std::size_t pos_val = 0;
    for (auto i : ds.splits.train) {
        pos_train += ds.labels[i] == 1 ? 1U : 0U;
    }
    for (auto i : ds.splits.validation) {
        pos_val += ds.labels[i] == 1 ? 1U : 0U;
    }
    EXPECT_EQ(pos_train, 218U);
    EXPECT_EQ(pos_val, 38U);
    EXPECT_NO_THROW(ds.validate());
}

TEST(Splits, PartitionCoversEveryRowOnce) {
    const auto ds = make_standard_splits(corpus(300, 280), 5);
    std::set<std::size_t> all;
    for (const auto *p : {&ds.splits.train, &ds.splits.validation, &ds.splits.test}) {
        EXPECT_TRUE(std::is_sorted(p->begin(), p->end()));
        all.insert(p->begin(), p->end());
    }
    EXPECT_EQ(all.size(), ds.size());
}

TEST(Splits, SeedControlsMembership) {
    const auto base = corpus(400, 400);
    const auto a = make_standard_splits(base, 1);
    const auto b = make_standard_splits(base, 1);
    const auto c = make_standard_splits(base, 2);
    EXPECT_EQ(a.splits, b.splits);
    EXPECT_NE(a.splits.train, c.splits.train);
}

TEST(Splits, InsufficientClassIsADataError) {
    EXPECT_THROW(make_standard_splits(corpus(255, 1000), 0), DataError);
}

TEST(Splits, RecipeValidation) {
    EXPECT_THROW(make_standard_splits(corpus(300, 300), 0, SplitRecipe{0, 0.15}), ConfigError);
    EXPECT_THROW(make_standard_splits(corpus(300, 300), 0, SplitRecipe{256, 1.0}), ConfigError);
}

TEST(Synthetic, ShapeBalanceAndDeterminism) {
    const auto a = synthetic_clusters(ClusterSpec{16, 40, 10.0, 3});
    EXPECT_EQ(a.dim, 16U);
    EXPECT_EQ(a.size(), 80U);
    EXPECT_EQ(std::count(a.labels.begin(), a.labels.end(), 1), 40);
    EXPECT_EQ(a, synthetic_clusters(ClusterSpec{16, 40, 10.0, 3}));
    EXPECT_NE(a.values, synthetic_clusters(ClusterSpec{16, 40, 10.0, 4}).values);
    for (double v : a.values) {
        EXPECT_EQ(v, static_cast<double>(static_cast<float>(v)));
    }
}

std::vector<double> class_mean(const EmbeddingDataset &ds, int label) {
    std::vector<double> m(ds.dim, 0.0);
    std::size_t n = 0;
    for (std::size_t i = 0; i < ds.size(); ++i) {
        if (ds.labels[i] == label) {
            for (std::size_t j = 0; j < ds.dim; ++j) {
                m[j] += ds.row(i)[j];
            }
            ++n;
        }
    }
    for (auto &x : m) {
        x /= static_cast<double>(n);
    }
    return m;
}

double dot(const std::vector<double> &a, const std::vector<double> &b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        s += a[i] * b[i];
    }
    return s;
}

TEST(Synthetic, MeansSitAtPlusMinusHalfSeparationAndShiftIsOrthogonal) {
    const auto ds = synthetic_clusters(ClusterSpec{4, 20000, 6.0, 8, 5.0});
    const auto m0 = class_mean(ds, 0);
    const auto m1 = class_mean(ds, 1);
    std::vector<double> diff(4);
    std::vector<double> mid(4);
    for (std::size_t j = 0; j < 4; ++j) {
        diff[j] = m1[j] - m0[j];
        mid[j] = 0.5 * (m1[j] + m0[j]);
    }
    EXPECT_NEAR(std::sqrt(dot(diff, diff)), 6.0, 0.05);
    EXPECT_NEAR(std::sqrt(dot(mid, mid)), 5.0, 0.05);
    EXPECT_NEAR(dot(diff, mid) / (6.0 * 5.0), 0.0, 0.01);
}

TEST(Synthetic, ZeroSeparationIsChanceForATrainedModel) {
    const auto ds = make_standard_splits(synthetic_clusters(ClusterSpec{32, 756, 0.0, 9}), 10);
    LogisticRegression model(32);
    TrainConfig cfg;
    cfg.epochs = 10;
    cfg.learning_rate = 0.01;
    const auto r = train(model, ds, cfg, {});
    EXPECT_NEAR(r.test_acc, 0.5, 0.05);
}

TEST(Synthetic, RejectsBadSpecs) {
    EXPECT_THROW(synthetic_clusters(ClusterSpec{0, 4, 1.0, 0}), ConfigError);
    EXPECT_THROW(synthetic_clusters(ClusterSpec{4, 4, -1.0, 0}), ConfigError);
    EXPECT_THROW(synthetic_clusters(ClusterSpec{1, 4, 1.0, 0, 2.0}), ConfigError);
}

TEST(Dataset, ValidateCatchesOverlappingSplits) {
    auto ds = corpus(3, 3);
    ds.splits.train = {0, 1};
    ds.splits.test = {1};
    EXPECT_THROW(ds.validate(), DataError);
    ds.splits.test = {9};
    EXPECT_THROW(ds.validate(), DataError);
}

} // namespace
} // namespace qhead
