#pragma once

#include "softbound/version.hpp"
#include "softbound/error.hpp"
#include "softbound/core/matrix.hpp"
#include "softbound/core/types.hpp"
#include "softbound/core/embedding_io.hpp"
#include "softbound/core/annotations.hpp"
#include "softbound/core/supervision_io.hpp"
#include "softbound/expansion/prompt.hpp"
#include "softbound/expansion/cache.hpp"
#include "softbound/expansion/llm_client.hpp"
#include "softbound/expansion/expander.hpp"
#include "softbound/expansion/query_noise.hpp"
#include "softbound/fusion/attention.hpp"
#include "softbound/fusion/temporal_fusion.hpp"
#include "softbound/supervision/similarity.hpp"
#include "softbound/supervision/boundary_probability.hpp"
#include "softbound/losses/losses.hpp"
#include "softbound/losses/toy_head.hpp"
#include "softbound/losses/grad_check.hpp"
#include "softbound/metrics/metrics.hpp"
#include "softbound/metrics/predictions_io.hpp"
#include "softbound/perturbation/noise.hpp"
#include "softbound/pipeline/config.hpp"
#include "softbound/pipeline/worker_pool.hpp"
#include "softbound/pipeline/layout.hpp"
#include "softbound/pipeline/fixture.hpp"
#include "softbound/pipeline/commands.hpp"
