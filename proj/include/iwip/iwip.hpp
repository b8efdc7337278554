#pragma once

#include "iwip/word.hpp"
#include "iwip/automorphism.hpp"
#include "iwip/stallings.hpp"
#include "iwip/graph.hpp"
#include "iwip/matrix.hpp"
#include "iwip/graph_map.hpp"
#include "iwip/turns.hpp"
#include "iwip/moves.hpp"
#include "iwip/train_track.hpp"
#include "iwip/fold.hpp"
#include "iwip/pnp.hpp"
#include "iwip/whitehead.hpp"
#include "iwip/classify.hpp"
#include "iwip/outer_space.hpp"
#include "iwip/random_walk.hpp"
#include "iwip/io.hpp"
