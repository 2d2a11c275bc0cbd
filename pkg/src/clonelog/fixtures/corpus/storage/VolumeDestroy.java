package storage;

public class VolumeDestroy {
    private static final Logger LOG = LoggerFactory.getLogger(VolumeDestroy.class);

    public boolean destroyVolume(String volumeUuid) {
        ElastistorClient client = connectionPool.borrow();
        try {
            DeleteResponse response = client.deleteVolume(volumeUuid);
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
