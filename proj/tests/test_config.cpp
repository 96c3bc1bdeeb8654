#include <gtest/gtest.h>

#include "eventsem/config.hpp"
#include "oracles.hpp"

using namespace eventsem;

TEST(Config, Defaults) {
    const PipelineConfig cfg;
    EXPECT_EQ(cfg.retrieval.kernel, Kernel::pooled);
    EXPECT_EQ(cfg.pooling, PoolingMode::max);
    EXPECT_EQ(cfg.retrieval.top_r, 5u);
    EXPECT_EQ(cfg.retrieval.fusion_weight, 6.0);
    EXPECT_EQ(cfg.retrieval.augmentation_k, 5u);
    EXPECT_EQ(cfg.retrieval.percentile, 50.0);
    EXPECT_EQ(cfg.retrieval.text_normalization, TextNormalization::mean);
    EXPECT_EQ(cfg.retrieval.scorer, Scorer::fused);
}

TEST(Config, ApplySetting) {
    PipelineConfig cfg;
    apply_setting(cfg, "kernel", "hausdorff");
    apply_setting(cfg, "mode", "avg");
    apply_setting(cfg, "R", "3");
    apply_setting(cfg, "w", "2.5");
    apply_setting(cfg, "k", "0");
    apply_setting(cfg, "percentile", "75");
    apply_setting(cfg, "text_norm", "raw");
    apply_setting(cfg, "scorer", "matching-asr");
    apply_setting(cfg, "seed", "7");
    EXPECT_EQ(cfg.retrieval.kernel, Kernel::hausdorff);
    EXPECT_EQ(cfg.pooling, PoolingMode::avg);
    EXPECT_EQ(cfg.retrieval.top_r, 3u);
    EXPECT_EQ(cfg.retrieval.fusion_weight, 2.5);
    EXPECT_EQ(cfg.retrieval.augmentation_k, 0u);
    EXPECT_EQ(cfg.retrieval.percentile, 75.0);
    EXPECT_EQ(cfg.retrieval.text_normalization, TextNormalization::raw_sum);
    EXPECT_EQ(cfg.retrieval.scorer, Scorer::matching_asr);
    EXPECT_EQ(cfg.seed, 7u);
}

TEST(Config, RejectsBadValues) {
    for (auto [k, v] : std::vector<std::pair<std::string, std::string>>{{"R", "0"},
                                                                         {"R", "-1"},
                                                                         {"w", "0"},
                                                                         {"w", "abc"},
                                                                         {"percentile", "0"},
                                                                         {"percentile", "101"},
                                                                         {"kernel", "cosine"},
                                                                         {"mode", "median"},
                                                                         {"scorer", "best"},
                                                                         {"colour", "red"}}) {
        PipelineConfig cfg;
        EXPECT_THROW(apply_setting(cfg, k, v), InputError) << k << "=" << v;
    }
}

TEST(Config, File) {
    testutil::TempDir dir;
    PipelineConfig cfg;
    apply_config_file(cfg, dir.write("a.conf", "# comment\nkernel = hausdorff\n\nR=7   # trailing\n"));
    EXPECT_EQ(cfg.retrieval.kernel, Kernel::hausdorff);
    EXPECT_EQ(cfg.retrieval.top_r, 7u);
    EXPECT_THROW(apply_config_file(cfg, dir.write("b.conf", "kernel hausdorff\n")), InputError);
    EXPECT_THROW(apply_config_file(cfg, dir.file("missing.conf")), InputError);
}
