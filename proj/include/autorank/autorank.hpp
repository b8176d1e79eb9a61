#pragma once

#include "autorank/cli.hpp"
#include "autorank/complexity.hpp"
#include "autorank/config.hpp"
#include "autorank/data.hpp"
#include "autorank/dataset.hpp"
#include "autorank/error.hpp"
#include "autorank/fedsim.hpp"
#include "autorank/lora.hpp"
#include "autorank/matrix.hpp"
#include "autorank/mcda.hpp"
#include "autorank/nn.hpp"
#include "autorank/parallel.hpp"
#include "autorank/rank.hpp"
#include "autorank/rng.hpp"
