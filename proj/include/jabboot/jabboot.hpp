#pragma once

#include "jabboot/blocks.hpp"
#include "jabboot/boot.hpp"
#include "jabboot/harness.hpp"
#include "jabboot/jab.hpp"
#include "jabboot/parallel.hpp"
#include "jabboot/rng.hpp"
#include "jabboot/series.hpp"
#include "jabboot/smooth.hpp"
#include "jabboot/tsgen.hpp"
