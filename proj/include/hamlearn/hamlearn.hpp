#pragma once

#include "hamlearn/cost.hpp"
#include "hamlearn/dataset.hpp"
#include "hamlearn/errors.hpp"
#include "hamlearn/hamiltonian.hpp"
#include "hamlearn/io.hpp"
#include "hamlearn/linalg.hpp"
#include "hamlearn/optimizer.hpp"
#include "hamlearn/rng.hpp"
#include "hamlearn/version.hpp"
