def execute_command(image):
    image_patch = ImagePatch(image)
    trash_can_patches = image_patch.find('trash can')
    if len(trash_can_patches) == 0:
        return {'function': 'None', 'error': 'No trash can found.'}
    trash_can = trash_can_patches[0]
    return {'function': 'navigate_to_object', 'inputs': (trash_can.horizontal_center, trash_can.vertical_center), 'box': [trash_can.left, trash_can.lower, trash_can.right, trash_can.upper]}
