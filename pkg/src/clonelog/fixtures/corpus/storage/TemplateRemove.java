package storage;

public class TemplateRemove {
    private static final Logger LOG = LoggerFactory.getLogger(TemplateRemove.class);

    public void removeTemplate(Template tmpl) {
        String url = tmpl.getInstallPath();
        imageStore.deleteObject(url);
        templateDao.remove(tmpl.getId());
        LOG.warn("Template successfully deleted");
    }
}
