#pragma once

#include "loewner/bangbang.hpp"
#include "loewner/core.hpp"
#include "loewner/extend.hpp"
#include "loewner/fixtures.hpp"
#include "loewner/forward.hpp"
#include "loewner/geometry.hpp"
#include "loewner/io.hpp"
#include "loewner/lmr_oracle.hpp"
#include "loewner/roundtrip.hpp"
#include "loewner/table.hpp"
#include "loewner/zipper.hpp"
