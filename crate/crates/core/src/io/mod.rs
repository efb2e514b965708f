//! Service pools, synthetic generation, instance sampling and the instance
//! file format.

mod codec;
mod pool;
mod sample;
mod synthetic;

pub use codec::{read_instance, write_instance, CodecError, INSTANCE_SCHEMA};
pub use pool::{
    load_service_pool_csv, parse_service_pool_csv, write_service_pool_csv, ColumnMap, ColumnRef,
    PoolEntry, PoolError, ServicePool,
};
pub use sample::{sample_instance, SampleError, WorkflowShape};
pub use synthetic::{generate_synthetic_pool, InvalidSpec, SyntheticSpec};
