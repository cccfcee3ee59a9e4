#pragma once

#include "aim/baker.hpp"
#include "aim/eigenflow.hpp"
#include "aim/generate.hpp"
#include "aim/io.hpp"
#include "aim/linalg.hpp"
#include "aim/rng.hpp"
#include "aim/tau.hpp"
#include "aim/time_vector.hpp"
#include "aim/triple.hpp"
#include "aim/types.hpp"
