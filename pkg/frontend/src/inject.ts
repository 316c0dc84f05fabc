/* Injection entry point: bundled as a classic IIFE script and inlined into
 * served pages by the harness. */

import { install } from "./recorder";

install(document, window);
