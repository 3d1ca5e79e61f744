#pragma once

#include "morphtag/adam.hpp"           // IWYU pragma: export
#include "morphtag/batching.hpp"       // IWYU pragma: export
#include "morphtag/checkpoint.hpp"     // IWYU pragma: export
#include "morphtag/commands.hpp"       // IWYU pragma: export
#include "morphtag/corpus_io.hpp"      // IWYU pragma: export
#include "morphtag/disambiguator.hpp"  // IWYU pragma: export
#include "morphtag/embeddings.hpp"     // IWYU pragma: export
#include "morphtag/graph.hpp"          // IWYU pragma: export
#include "morphtag/layers.hpp"         // IWYU pragma: export
#include "morphtag/lexicon.hpp"        // IWYU pragma: export
#include "morphtag/mapping.hpp"        // IWYU pragma: export
#include "morphtag/metrics.hpp"        // IWYU pragma: export
#include "morphtag/normalize.hpp"      // IWYU pragma: export
#include "morphtag/rng.hpp"            // IWYU pragma: export
#include "morphtag/schema.hpp"         // IWYU pragma: export
#include "morphtag/synthetic.hpp"      // IWYU pragma: export
#include "morphtag/tagger.hpp"         // IWYU pragma: export
#include "morphtag/tensor.hpp"         // IWYU pragma: export
#include "morphtag/trainer.hpp"        // IWYU pragma: export
#include "morphtag/vocab.hpp"          // IWYU pragma: export
