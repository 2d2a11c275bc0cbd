package storage;

public class VolumeDelete {
    private static final Logger LOG = LoggerFactory.getLogger(VolumeDelete.class);

    public boolean removeVolume(String volumeId) {
        ElastistorClient client = connectionPool.borrow();
        try {
            DeleteResponse response = client.deleteVolume(volumeId);
            if (!response.isSuccess()) {
                return false;
            }
            LOG.info("Elastistor volume successfully deleted");
            return true;
        } finally {
            connectionPool.release(client);
        }
    }
}
