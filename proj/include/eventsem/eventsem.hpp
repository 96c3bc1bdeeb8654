#pragma once

#include "eventsem/bench.hpp"
#include "eventsem/concepts.hpp"
#include "eventsem/config.hpp"
#include "eventsem/embedding_space.hpp"
#include "eventsem/errors.hpp"
#include "eventsem/evaluation.hpp"
#include "eventsem/retrieval.hpp"
#include "eventsem/similarity.hpp"
#include "eventsem/stopwords.hpp"
#include "eventsem/synthetic.hpp"
#include "eventsem/vector_ops.hpp"
#include "eventsem/video_ingest.hpp"
