#pragma once

#include "qel/bits.hpp"
#include "qel/codec.hpp"
#include "qel/config.hpp"
#include "qel/elfinder.hpp"
#include "qel/errors.hpp"
#include "qel/harness.hpp"
#include "qel/qcore.hpp"
#include "qel/rational.hpp"
#include "qel/rng.hpp"
#include "qel/schumacher.hpp"
#include "qel/version.hpp"
