#include <gtest/gtest.h>

#include <filesystem>
#include <set>

#include "autorank/complexity.hpp"
#include "autorank/data.hpp"
#include "idx_fixture.hpp"

using namespace autorank;
using namespace autorank::data;

namespace {

ErrorCode idx_error(const fixture::Bytes& images, const fixture::Bytes& labels) {
  try {
    parse_idx(images, labels);
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::IoError;
}

const fixture::Bytes kPixels = {0, 255, 51, 102, 153, 204, 1, 2, 3, 9, 8, 7, 6, 5, 4, 3, 2, 255};

}  // namespace

TEST(Blobs, Deterministic) {
  EXPECT_EQ(generate_blobs(10, 100, 16, 0.1, 42), generate_blobs(10, 100, 16, 0.1, 42));
  EXPECT_NE(generate_blobs(10, 100, 16, 0.1, 42).features, generate_blobs(10, 100, 16, 0.1, 43).features);
}

TEST(Blobs, LayoutAndRange) {
  const auto ds = generate_blobs(3, 5, 4, 0.5, 1);
  EXPECT_EQ(ds.size(), 15u);
  EXPECT_EQ(ds.dim(), 4u);
  EXPECT_EQ(ds.classes, 3u);
  EXPECT_EQ(ds.labels[0], 0);
  EXPECT_EQ(ds.labels[14], 2);
  for (double v : ds.features.flat()) {
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, 1.0);
  }
  EXPECT_NO_THROW(ds.validate());
}

TEST(Blobs, ZeroSpreadCollapsesToCenters) {
  const auto ds = generate_blobs(4, 6, 5, 0.0, 3);
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const std::size_t first = static_cast<std::size_t>(ds.labels[i]) * 6;
    EXPECT_TRUE(std::equal(ds.features.row(i).begin(), ds.features.row(i).end(), ds.features.row(first).begin()));
  }
}

TEST(Blobs, InvalidParams) {
  EXPECT_THROW(generate_blobs(0, 5, 4, 0.1, 1), Error);
  EXPECT_THROW(generate_blobs(2, 5, 4, -0.1, 1), Error);
}

TEST(Idx, HandBuiltPair) {
  const auto ds = parse_idx(fixture::idx_images(kIdxImagesMagic, 2, 3, 3, kPixels),
                            fixture::idx_labels(kIdxLabelsMagic, 2, {7, 3}));
  ASSERT_EQ(ds.features.rows(), 2u);
  ASSERT_EQ(ds.features.cols(), 9u);
  EXPECT_EQ(ds.labels, (std::vector<int>{7, 3}));
  EXPECT_EQ(ds.classes, 8u);
  for (std::size_t i = 0; i < kPixels.size(); ++i) EXPECT_EQ(ds.features.flat()[i], kPixels[i] / 255.0);
  EXPECT_EQ(ds.features(0, 1), 1.0);
  EXPECT_EQ(ds.features(0, 0), 0.0);
}

TEST(Idx, BadMagic) {
  const auto labels = fixture::idx_labels(kIdxLabelsMagic, 2, {7, 3});
  EXPECT_EQ(idx_error(fixture::idx_images(0x802, 2, 3, 3, kPixels), labels), ErrorCode::BadMagic);
  EXPECT_EQ(idx_error(fixture::idx_images(kIdxImagesMagic, 2, 3, 3, kPixels),
                      fixture::idx_labels(kIdxImagesMagic, 2, {7, 3})),
            ErrorCode::BadMagic);
}

TEST(Idx, Truncation) {
  const fixture::Bytes four(4 * 9, 1);
  EXPECT_EQ(idx_error(fixture::idx_images(kIdxImagesMagic, 5, 3, 3, four),
                      fixture::idx_labels(kIdxLabelsMagic, 5, {0, 1, 2, 3, 4})),
            ErrorCode::TruncatedFile);
  EXPECT_EQ(idx_error(fixture::idx_images(kIdxImagesMagic, 2, 3, 3, kPixels),
                      fixture::idx_labels(kIdxLabelsMagic, 3, {1, 2})),
            ErrorCode::TruncatedFile);
  EXPECT_EQ(idx_error({0, 0, 8}, fixture::idx_labels(kIdxLabelsMagic, 0, {})), ErrorCode::TruncatedFile);
  EXPECT_EQ(idx_error(fixture::idx_images(kIdxImagesMagic, 0xffffffffu, 0xffffffffu, 0xffffffffu, kPixels),
                      fixture::idx_labels(kIdxLabelsMagic, 1, {1})),
            ErrorCode::TruncatedFile);
}

TEST(Idx, CountMismatch) {
  EXPECT_EQ(idx_error(fixture::idx_images(kIdxImagesMagic, 2, 3, 3, kPixels),
                      fixture::idx_labels(kIdxLabelsMagic, 1, {1})),
            ErrorCode::CountMismatch);
}

TEST(Idx, ReadFromDisk) {
  const auto dir = std::filesystem::temp_directory_path() / "autorank_idx_test";
  std::filesystem::create_directories(dir);
  fixture::write(dir / "img", fixture::idx_images(kIdxImagesMagic, 2, 3, 3, kPixels));
  fixture::write(dir / "lbl", fixture::idx_labels(kIdxLabelsMagic, 2, {0, 1}));
  EXPECT_EQ(read_idx((dir / "img").string(), (dir / "lbl").string()).size(), 2u);
  try {
    read_idx((dir / "missing").string(), (dir / "lbl").string());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::IoError);
  }
  std::filesystem::remove_all(dir);
}

TEST(Partition, StaircaseShape) {
  const auto ds = generate_blobs(10, 300, 4, 0.1, 42);
  const auto shards = partition_staircase(ds, {Scheme::Staircase, 10, 20, 5, 42});
  ASSERT_EQ(shards.size(), 10u);
  for (std::size_t i = 0; i < 9; ++i) {
    const auto h = complexity::LabelHistogram::from_labels(shards[i].data.labels);
    EXPECT_EQ(h.present_labels(), i + 1);
    for (const auto& [label, n] : h.counts) EXPECT_EQ(n, 20u);
  }
  const auto anchor = complexity::LabelHistogram::from_labels(shards[9].data.labels);
  EXPECT_EQ(anchor.present_labels(), 10u);
  EXPECT_EQ(anchor.total(), 1000u);
  EXPECT_EQ(shards[0].data.size(), 20u);
}

TEST(Partition, StaircaseDrawsWithoutReplacement) {
  const auto ds = generate_blobs(10, 300, 4, 0.1, 42);
  std::set<std::size_t> seen;
  std::size_t total = 0;
  for (const auto& s : partition_staircase(ds, {Scheme::Staircase, 10, 20, 5, 42})) {
    seen.insert(s.indices.begin(), s.indices.end());
    total += s.indices.size();
    for (std::size_t i = 0; i < s.indices.size(); ++i) EXPECT_EQ(s.data.labels[i], ds.labels[s.indices[i]]);
  }
  EXPECT_EQ(seen.size(), total);
}

TEST(Partition, StaircaseNeedsEnoughSamples) {
  const auto ds = generate_blobs(10, 50, 4, 0.1, 42);
  try {
    partition_staircase(ds, {Scheme::Staircase, 10, 20, 5, 42});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InsufficientSamples);
  }
}

TEST(Partition, TwoClient) {
  const auto ds = generate_blobs(10, 400, 4, 0.1, 1);
  const auto shards = partition_two_client(ds, 30, 1);
  ASSERT_EQ(shards.size(), 2u);
  EXPECT_EQ(shards[0].data.size(), 300u);
  EXPECT_EQ(shards[1].data.size(), 300u);
  EXPECT_EQ(complexity::LabelHistogram::from_labels(shards[0].data.labels).present_labels(), 10u);
  const auto h1 = complexity::LabelHistogram::from_labels(shards[1].data.labels);
  EXPECT_EQ(h1.present_labels(), 1u);
  EXPECT_EQ(h1.counts.begin()->first, 0);
}

TEST(Partition, IidCoversEverything) {
  const auto ds = generate_blobs(3, 10, 2, 0.1, 1);
  const auto shards = partition_iid(ds, 4, 9);
  std::set<std::size_t> seen;
  for (const auto& s : shards) seen.insert(s.indices.begin(), s.indices.end());
  EXPECT_EQ(seen.size(), 30u);
  EXPECT_EQ(shards[0].data.size() + shards[1].data.size() + shards[2].data.size() + shards[3].data.size(), 30u);
}

TEST(Partition, Deterministic) {
  const auto ds = generate_blobs(10, 300, 4, 0.1, 42);
  const PartitionSpec spec{Scheme::Staircase, 10, 20, 5, 7};
  const auto a = partition(ds, spec), b = partition(ds, spec);
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i].indices, b[i].indices);
}

TEST(Split, StratifiedAndDisjoint) {
  const auto ds = generate_blobs(4, 50, 3, 0.1, 2);
  const auto [train, test] = stratified_split(ds, 0.2, 5);
  EXPECT_EQ(train.size(), 160u);
  EXPECT_EQ(test.size(), 40u);
  for (const auto& [label, n] : complexity::LabelHistogram::from_labels(test.labels).counts) EXPECT_EQ(n, 10u);
  EXPECT_THROW(stratified_split(ds, 1.0, 5), Error);
}

TEST(Subset, CapsPerClass) {
  const auto ds = generate_blobs(4, 50, 3, 0.1, 2);
  const auto sub = stratified_subset(ds, 7, 3);
  EXPECT_EQ(sub.size(), 28u);
  EXPECT_EQ(sub.classes, 4u);
  EXPECT_EQ(stratified_subset(ds, 100, 3), ds);
}

TEST(DatasetCsv, Header) {
  LabeledDataset ds;
  ds.classes = 2;
  ds.features = Matrix::from_rows({{0.5, 0.25}});
  ds.labels = {1};
  EXPECT_EQ(to_csv(ds), "label,f0,f1\n1,0.5,0.25\n");
}
