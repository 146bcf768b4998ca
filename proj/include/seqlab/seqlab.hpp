#pragma once

#include "seqlab/batching.hpp"
#include "seqlab/common.hpp"
#include "seqlab/conll.hpp"
#include "seqlab/conv.hpp"
#include "seqlab/crf.hpp"
#include "seqlab/embeddings.hpp"
#include "seqlab/grad_check.hpp"
#include "seqlab/graph.hpp"
#include "seqlab/lstm.hpp"
#include "seqlab/metrics.hpp"
#include "seqlab/optim.hpp"
#include "seqlab/param_store.hpp"
#include "seqlab/pipeline.hpp"
#include "seqlab/rng.hpp"
#include "seqlab/run_config.hpp"
#include "seqlab/sense.hpp"
#include "seqlab/spelling.hpp"
#include "seqlab/suffix.hpp"
#include "seqlab/tagger.hpp"
#include "seqlab/tensor.hpp"
#include "seqlab/train.hpp"
#include "seqlab/vocab.hpp"
