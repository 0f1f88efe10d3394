#pragma once

#include "rankexpl/blackbox.hpp"
#include "rankexpl/candidates.hpp"
#include "rankexpl/embeddings.hpp"
#include "rankexpl/errors.hpp"
#include "rankexpl/harness.hpp"
#include "rankexpl/index.hpp"
#include "rankexpl/io.hpp"
#include "rankexpl/metrics.hpp"
#include "rankexpl/preference.hpp"
#include "rankexpl/random.hpp"
#include "rankexpl/rankers.hpp"
#include "rankexpl/ranking.hpp"
#include "rankexpl/solver.hpp"
#include "rankexpl/synthetic.hpp"
#include "rankexpl/tokenizer.hpp"
