package storage;

public class SnapshotPurge {
    private static final Logger LOG = LoggerFactory.getLogger(SnapshotPurge.class);

    public void purgeSnapshots(List<Snapshot> snapshots, boolean force) {
        int purged = 0;
        for (Snapshot snap : snapshots) {
            if (snap.isProtected() && !force) {
                continue;
            }
            snapshotStore.delete(snap.getPath());
            purged++;
        }
        metrics.record("snapshots.removed", purged);
        LOG.debug("Snapshot successfully deleted");
    }
}
