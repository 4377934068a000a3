#ifndef CROSSVOX_CROSSVOX_HPP
#define CROSSVOX_CROSSVOX_HPP

#include "crossvox/acoustic.hpp"
#include "crossvox/adam.hpp"
#include "crossvox/align.hpp"
#include "crossvox/analysis.hpp"
#include "crossvox/artic.hpp"
#include "crossvox/checkpoint.hpp"
#include "crossvox/core.hpp"
#include "crossvox/corpus.hpp"
#include "crossvox/embedding.hpp"
#include "crossvox/errors.hpp"
#include "crossvox/meta.hpp"
#include "crossvox/rng.hpp"
#include "crossvox/unicode.hpp"

#endif  // CROSSVOX_CROSSVOX_HPP
