package storage;

public class TemplateDelete {
    private static final Logger LOG = LoggerFactory.getLogger(TemplateDelete.class);

    public void deleteTemplate(Template template) {
        String url = template.getInstallPath();
        imageStore.deleteObject(url);
        templateDao.remove(template.getId());
        LOG.info("Template successfully deleted");
    }
}
