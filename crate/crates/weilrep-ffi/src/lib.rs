//! C ABI for the weilrep library. Placeholder; filled in once the core
//! library surface is complete.
